#pragma once

#include "interact/replay/replay.hpp"
#include "interact/session/session.hpp"
#include "interact/session/wire.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace interact::gateway {

using session::Json;

struct CatalogEntry {
  std::string id;  // file stem
  std::string path;
  bool valid = false;
  std::string name;
  std::size_t step_count = 0;
  std::vector<std::string> difficulties;
  std::string error;  // first error diagnostic when invalid
};

/// Every `.itx` file in `dir`, sorted by id. Throws E_SCENARIO_DIR when the
/// directory cannot be read.
std::vector<CatalogEntry> list_scenarios(const std::filesystem::path& dir);
Json catalog_to_json(const std::vector<CatalogEntry>& entries);

enum class Control { kPause, kResume, kAbandon };

/// A UserInput or a session control; wire form adds kinds pause, resume and
/// abandon to the input encodings.
using ClientCommand = std::variant<session::UserInput, Control>;

/// Throws E_BAD_INPUT.
ClientCommand command_from_json(const Json& j);

/// Snapshot sent to stream clients: tick, body poses, cable nodes, step
/// statuses, active steps with instructions, helpers, events and step
/// completions since the previous frame, partial score.
Json wire_frame(const session::Session& s, const std::vector<std::string>& fired,
                const std::vector<std::string>& completed);

/// A session driven by a command queue. Commands are stamped with the next
/// engine tick on arrival and applied FIFO. All members lock internally.
class LiveSession {
 public:
  LiveSession(std::string id, std::shared_ptr<const Scenario> scenario, const std::string& difficulty,
              std::uint64_t stream_divisor);

  const std::string& id() const { return id_; }
  double dt() const { return session_.dt(); }  // fixed at construction

  /// Throws E_SESSION_FINISHED once the session has ended. Returns the final
  /// message when the command was an abandon.
  std::optional<Json> enqueue(const ClientCommand& cmd);

  struct Output {
    std::optional<Json> frame;
    std::optional<Json> final;  // {"final": ScoreReport}, sent once
  };
  /// One engine tick; no-op while paused or finished. A frame is produced on
  /// every stream_divisor-th tick and on the tick that finishes the session.
  Output advance();

  Json state() const;
  /// The replay log of everything run so far; the report is an abandon
  /// report while steps remain.
  std::string replay_log() const;
  std::uint64_t state_hash() const;
  bool finished() const;

 private:
  Json final_message_locked();
  session::ScoreReport report_locked() const;

  mutable std::mutex mu_;
  std::string id_;
  std::uint64_t divisor_;
  session::Session session_;
  std::vector<session::UserInput> queue_;
  std::vector<replay::TraceRecord> records_;
  std::vector<replay::Checkpoint> checkpoints_;
  std::vector<std::string> fired_since_frame_;
  std::vector<std::string> completed_since_frame_;
  bool paused_ = false;
  bool abandoned_ = false;
  bool ended_ = false;
};

struct GatewayConfig {
  std::filesystem::path scenario_dir;
  std::uint64_t stream_divisor = 6;
};

/// Scenario catalog plus the table of live sessions.
class Gateway {
 public:
  explicit Gateway(GatewayConfig cfg);

  const GatewayConfig& config() const { return cfg_; }
  Json list() const;

  /// An empty difficulty picks the first declared one. Throws E_NOT_FOUND
  /// (unknown scenario), E_INVALID_SCENARIO or E_UNKNOWN_DIFFICULTY.
  std::string create_session(const std::string& scenario_id, const std::string& difficulty);
  std::shared_ptr<LiveSession> find(const std::string& id) const;

 private:
  GatewayConfig cfg_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<LiveSession>> sessions_;
  std::uint64_t next_id_ = 1;
};

}  // namespace interact::gateway
