#pragma once

#include "interact/scene/types.hpp"
#include "interact/session/session.hpp"
#include "interact/session/wire.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace interact::replay {

inline constexpr std::uint64_t kCheckpointInterval = 120;
inline constexpr const char* kEngineVersion = "interact-engine 1.0";

/// Input applied during the tick call with index `tick` (0-based). After that
/// call the world tick count is tick + 1.
struct TraceRecord {
  std::uint64_t tick = 0;
  session::UserInput input;
};

struct ReplayHeader {
  std::string scenario;
  std::uint64_t scenario_hash = 0;
  std::string difficulty;
  double dt = 0.0;
  std::string engine_version = kEngineVersion;
};

/// State hash after the world tick count reaches `tick`.
struct Checkpoint {
  std::uint64_t tick = 0;
  std::uint64_t hash = 0;
};

struct ReplayLog {
  ReplayHeader header;
  std::vector<TraceRecord> records;
  std::vector<Checkpoint> checkpoints;
  std::uint64_t final_tick = 0;
  std::uint64_t final_hash = 0;
  session::Json final_report;
};

/// Trace lines `{"tick":N,"input":{...}}`. Blank lines are skipped; header,
/// checkpoint and final lines are ignored so a replay log doubles as a
/// trace. Throws E_TRACE_PARSE naming the line for malformed lines or ticks
/// that go backwards.
std::vector<TraceRecord> parse_trace(std::string_view jsonl);
std::string format_trace(const std::vector<TraceRecord>& records);

/// JSONL: header line, then records and checkpoints in tick order (the
/// records of tick call n come before the checkpoint at n + 1), then
/// `{"final":{"tick":T,"hash":"hex16","report":{...}}}`.
std::string write_log(const ReplayLog& log);
/// Throws E_LOG_PARSE.
ReplayLog parse_log(std::string_view jsonl);

struct RunOptions {
  /// Tick calls to execute. When unset the run stops after the last record's
  /// tick, or at once if there are no records.
  std::optional<std::uint64_t> ticks;
  /// Stop early once every step is terminal.
  bool stop_when_finished = false;
};

struct RunResult {
  ReplayLog log;
  session::ScoreReport report;  // abandoned when steps remain at the end
};

/// Runs a fresh session over the records and records the log.
RunResult record(std::shared_ptr<const Scenario> scenario, const std::string& difficulty,
                 const std::vector<TraceRecord>& records, const RunOptions& options = {});

struct ReplayResult {
  bool ok = true;
  std::optional<std::uint64_t> divergent_tick;
  std::string reason;
};

/// Re-executes the log. Throws E_SCENARIO_MISMATCH before running when the
/// scenario hash differs from the header, E_DT_MISMATCH likewise for dt.
ReplayResult replay(const ReplayLog& log, std::shared_ptr<const Scenario> scenario);

}  // namespace interact::replay
