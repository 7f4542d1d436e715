#include "interact/replay/replay.hpp"

#include "interact/error.hpp"
#include "interact/replay/hash.hpp"

#include <map>

namespace interact::replay {

using session::Json;

namespace {

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    const std::size_t stop = end == std::string_view::npos ? text.size() : end;
    std::string_view line = text.substr(start, stop - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

bool blank(std::string_view line) { return line.find_first_not_of(" \t") == std::string_view::npos; }

std::uint64_t tick_of(const Json& j) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    throw EngineError("E_BAD_INPUT", "'tick' must be a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

std::uint64_t hash_of(const Json& j) {
  const auto h = j.is_string() ? parse_hex16(j.get<std::string>()) : std::nullopt;
  if (!h) throw EngineError("E_BAD_INPUT", "'hash' must be 16 hex digits");
  return *h;
}

Json record_line(const TraceRecord& r) { return {{"tick", r.tick}, {"input", session::input_to_json(r.input)}}; }

TraceRecord record_from(const Json& j) {
  if (!j.contains("tick") || !j.contains("input")) throw EngineError("E_BAD_INPUT", "expected 'tick' and 'input'");
  return {tick_of(j.at("tick")), session::input_from_json(j.at("input"))};
}

/// Runs `ticks` tick calls feeding records by tick index; reports a
/// checkpoint whenever the tick count reaches a multiple of the interval.
template <typename OnCheckpoint>
std::size_t drive(session::Session& s, const std::vector<TraceRecord>& records, std::uint64_t ticks,
                  bool stop_when_finished, OnCheckpoint&& on_checkpoint) {
  std::size_t next = 0;
  std::vector<session::UserInput> inputs;
  for (std::uint64_t t = 0; t < ticks; ++t) {
    inputs.clear();
    while (next < records.size() && records[next].tick <= t) inputs.push_back(records[next++].input);
    s.tick(inputs);
    if (s.tick_count() % kCheckpointInterval == 0) on_checkpoint(s.tick_count(), state_hash(s));
    if (stop_when_finished && s.finished()) break;
  }
  return next;
}

}  // namespace

std::vector<TraceRecord> parse_trace(std::string_view jsonl) {
  std::vector<TraceRecord> out;
  std::size_t line_no = 0;
  for (const auto line : lines_of(jsonl)) {
    ++line_no;
    if (blank(line)) continue;
    try {
      const Json j = Json::parse(line);
      if (j.is_object() && (j.contains("header") || j.contains("checkpoint") || j.contains("final"))) continue;
      TraceRecord r = record_from(j);
      if (!out.empty() && r.tick < out.back().tick) {
        throw EngineError("E_BAD_INPUT", "tick " + std::to_string(r.tick) + " precedes an earlier record");
      }
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw EngineError("E_TRACE_PARSE", "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string format_trace(const std::vector<TraceRecord>& records) {
  std::string out;
  for (const auto& r : records) out += record_line(r).dump() + '\n';
  return out;
}

std::string write_log(const ReplayLog& log) {
  const auto& h = log.header;
  std::string out = Json{{"header",
                          {{"scenario", h.scenario},
                           {"scenario_hash", hex16(h.scenario_hash)},
                           {"difficulty", h.difficulty},
                           {"dt", h.dt},
                           {"engine_version", h.engine_version}}}}
                        .dump() +
                    '\n';
  std::size_t r = 0;
  for (const auto& cp : log.checkpoints) {
    // Records of tick call n precede the checkpoint taken at tick count n + 1.
    while (r < log.records.size() && log.records[r].tick < cp.tick) out += record_line(log.records[r++]).dump() + '\n';
    out += Json{{"checkpoint", {{"tick", cp.tick}, {"hash", hex16(cp.hash)}}}}.dump() + '\n';
  }
  while (r < log.records.size()) out += record_line(log.records[r++]).dump() + '\n';
  out += Json{{"final", {{"tick", log.final_tick}, {"hash", hex16(log.final_hash)}, {"report", log.final_report}}}}
             .dump() +
         '\n';
  return out;
}

ReplayLog parse_log(std::string_view jsonl) {
  ReplayLog log;
  bool have_header = false;
  bool have_final = false;
  std::size_t line_no = 0;
  for (const auto line : lines_of(jsonl)) {
    ++line_no;
    if (blank(line)) continue;
    try {
      const Json j = Json::parse(line);
      if (!j.is_object()) throw EngineError("E_BAD_INPUT", "expected an object");
      if (have_final) throw EngineError("E_BAD_INPUT", "content after the final line");
      if (j.contains("header")) {
        if (have_header) throw EngineError("E_BAD_INPUT", "duplicate header");
        const Json& h = j.at("header");
        log.header.scenario = h.at("scenario").get<std::string>();
        log.header.scenario_hash = hash_of(h.at("scenario_hash"));
        log.header.difficulty = h.at("difficulty").get<std::string>();
        log.header.dt = h.at("dt").get<double>();
        log.header.engine_version = h.at("engine_version").get<std::string>();
        have_header = true;
        continue;
      }
      if (!have_header) throw EngineError("E_BAD_INPUT", "the header must be the first line");
      if (j.contains("checkpoint")) {
        const Json& c = j.at("checkpoint");
        log.checkpoints.push_back({tick_of(c.at("tick")), hash_of(c.at("hash"))});
      } else if (j.contains("final")) {
        const Json& f = j.at("final");
        log.final_tick = tick_of(f.at("tick"));
        log.final_hash = hash_of(f.at("hash"));
        log.final_report = f.at("report");
        have_final = true;
      } else {
        TraceRecord r = record_from(j);
        if (!log.records.empty() && r.tick < log.records.back().tick) {
          throw EngineError("E_BAD_INPUT", "records out of tick order");
        }
        log.records.push_back(std::move(r));
      }
    } catch (const std::exception& e) {
      throw EngineError("E_LOG_PARSE", "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw EngineError("E_LOG_PARSE", "missing header line");
  if (!have_final) throw EngineError("E_LOG_PARSE", "missing final line");
  return log;
}

RunResult record(std::shared_ptr<const Scenario> scenario, const std::string& difficulty,
                 const std::vector<TraceRecord>& records, const RunOptions& options) {
  session::Session s(scenario, difficulty);
  RunResult out;
  ReplayLog& log = out.log;
  log.header = {scenario->name, scenario_hash(*scenario), s.difficulty().id, s.dt(), kEngineVersion};

  const std::uint64_t ticks = options.ticks ? *options.ticks : (records.empty() ? 0 : records.back().tick + 1);
  const std::size_t used = drive(s, records, ticks, options.stop_when_finished,
                                 [&](std::uint64_t tick, std::uint64_t hash) { log.checkpoints.push_back({tick, hash}); });
  log.records.assign(records.begin(), records.begin() + static_cast<std::ptrdiff_t>(used));

  out.report = s.finalize(!s.finished());
  log.final_tick = s.tick_count();
  log.final_hash = state_hash(s);
  log.final_report = session::score_to_json(out.report);
  return out;
}

ReplayResult replay(const ReplayLog& log, std::shared_ptr<const Scenario> scenario) {
  const std::uint64_t expected = scenario_hash(*scenario);
  if (expected != log.header.scenario_hash) {
    throw EngineError("E_SCENARIO_MISMATCH", "scenario hash " + hex16(expected) + " does not match log header " +
                                                 hex16(log.header.scenario_hash));
  }
  session::Session s(scenario, log.header.difficulty);
  if (s.dt() != log.header.dt) throw EngineError("E_DT_MISMATCH", "log was recorded with a different dt");

  std::map<std::uint64_t, std::uint64_t> logged;
  for (const auto& cp : log.checkpoints) logged.emplace(cp.tick, cp.hash);

  ReplayResult result;
  drive(s, log.records, log.final_tick, false, [&](std::uint64_t tick, std::uint64_t hash) {
    if (!result.ok) return;
    const auto it = logged.find(tick);
    if (it == logged.end() || it->second != hash) {
      result = {false, tick, it == logged.end() ? "checkpoint missing from log" : "checkpoint hash differs"};
    }
  });
  if (!result.ok) return result;
  if (logged.size() != log.final_tick / kCheckpointInterval) {
    return {false, log.final_tick, "log has checkpoints beyond the recorded run"};
  }
  if (state_hash(s) != log.final_hash) return {false, log.final_tick, "final hash differs"};
  const Json report = session::score_to_json(s.finalize(!s.finished()));
  if (report != log.final_report) return {false, log.final_tick, "final report differs"};
  return result;
}

}  // namespace interact::replay
