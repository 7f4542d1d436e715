#pragma once

#include "interact/physics/world.hpp"
#include "interact/scene/pose_error.hpp"
#include "interact/scene/types.hpp"
#include "interact/session/score.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace interact::session {

enum class StepStatus : std::uint8_t { kLocked, kActive, kCompleted, kSkipped };

const char* status_name(StepStatus s);

inline bool is_terminal(StepStatus s) { return s == StepStatus::kCompleted || s == StepStatus::kSkipped; }

/// Per-step progress. Times are kept in ticks so that clock arithmetic is
/// exact; seconds are ticks·dt.
struct StepState {
  StepStatus status = StepStatus::kLocked;
  std::uint64_t activated_tick = 0;
  std::optional<std::uint64_t> in_tolerance_since;  // first tick of the current in-tolerance run
  std::uint64_t in_tolerance_ticks = 0;
  std::uint64_t contact_ticks = 0;
  std::uint64_t completed_tick = 0;  // also the skip tick
  PoseError residual;
  int hints = 0;
};

struct HandPose {
  Pose pose;
};
struct Grab {
  std::string part;
};
struct Release {};
struct Press {
  std::string action_id;
};
struct HintRequest {
  std::string step;
};
struct SkipRequest {
  std::string step;
};
struct SetFlag {
  std::string name;
};

using UserInput = std::variant<HandPose, Grab, Release, Press, HintRequest, SkipRequest, SetFlag>;

/// One entry of the ordered session log. Kinds: activated, completed,
/// skipped, event, flag, hint, grab, release, weld, unweld, auto_unweld,
/// activate, deactivate, particles, rejected, action_failed.
struct LogRecord {
  std::uint64_t tick = 0;
  std::string kind;
  std::string subject;
  std::string detail;
};

struct StepHelper {
  std::string step;
  std::optional<Pose> ghost;    // target world pose
  std::vector<Pose> trajectory;  // kTrajectoryPoints samples, empty when disabled
  std::optional<std::string> instruction;
  std::optional<std::string> hint;  // present once a hint was requested
};

inline constexpr int kTrajectoryPoints = 32;

/// Helpers for every active step, scenario order. Ghost and trajectory only
/// exist for placing steps.
using HelperFrame = std::vector<StepHelper>;

struct FrameReport {
  std::uint64_t tick = 0;
  HelperFrame helpers;
  std::vector<std::string> newly_completed;  // completed or skipped this tick
  std::vector<std::string> fired_events;
  double score_partial = 0.0;
};

/// A scenario being played. Owns its world; no state is shared between
/// sessions, so a session may move between threads but must not be used
/// from two at once.
class Session {
 public:
  /// Throws E_INVALID_SCENARIO when validation reports errors and
  /// E_UNKNOWN_DIFFICULTY (message lists the valid ids).
  Session(std::shared_ptr<const Scenario> scenario, const std::string& difficulty);

  /// Applies the inputs in order, steps the world once, then settles step
  /// completion, unlocking and events. Bad inputs are logged as "rejected".
  FrameReport tick(const std::vector<UserInput>& inputs);

  /// Throws E_UNKNOWN_STEP or E_STEP_NOT_ACTIVE.
  std::string request_hint(const std::string& step);
  /// Throws E_UNKNOWN_STEP or E_STEP_NOT_ACTIVE. Unlocks and events settle
  /// immediately.
  void skip_step(const std::string& step);

  /// Throws E_SESSION_INCOMPLETE when a step is not terminal and `abandon`
  /// is false.
  ScoreReport finalize(bool abandon = false) const;
  /// Mean over all steps with non-terminal ones counted as 0.
  double score_partial() const;

  bool finished() const;
  std::uint64_t tick_count() const { return world_.tick(); }
  double clock() const { return static_cast<double>(world_.tick()) * dt(); }
  double dt() const { return world_.config().dt; }

  const Scenario& scenario() const { return *scenario_; }
  const std::shared_ptr<const Scenario>& scenario_ptr() const { return scenario_; }
  const DifficultyLevel& difficulty() const { return difficulty_; }
  const physics::World& world() const { return world_; }
  const std::vector<StepState>& steps() const { return steps_; }
  const StepState& step_state(const std::string& id) const;
  const std::set<std::string>& flags() const { return flags_; }
  const std::set<std::string>& fired_events() const { return fired_; }
  const std::vector<LogRecord>& log() const { return log_; }
  const std::optional<Pose>& hand() const { return hand_; }
  std::optional<std::string> grabbed_part() const;

  HelperFrame helpers() const;

  /// Target world pose of a placing step: target part pose ∘ anchor pose.
  Pose placing_target(const PlacingStep& p) const;

  /// Canonical little-endian layout hashed alongside the world:
  ///   u64 tick, difficulty id
  ///   per step in scenario order: u8 status, u64 activated, u8 has_since,
  ///     u64 since, u64 in_tolerance_ticks, u64 contact_ticks, u64 completed,
  ///     f64 d_pos, f64 d_rot, u32 hints
  ///   u32 flag count + flags sorted, u32 fired count + event ids sorted
  ///   u8 hand known + hand pose, u64 input digest
  std::string serialize_status() const;

 private:
  std::size_t index_of(const std::string& step) const;
  void apply_input(const UserInput& in, std::set<std::string>& pressed);
  void release_grab();
  void complete(std::size_t i);
  void weld_to_target(const PlacingStep& p);
  void settle(const std::vector<physics::RegionEntry>& entries, std::vector<std::string>& fired);
  bool unlock();
  bool trigger_holds(const Trigger& t, const std::vector<physics::RegionEntry>& entries) const;
  void fire(const EventDef& ev);
  bool is_done(std::string_view step) const;
  void note(std::string kind, std::string subject, std::string detail = {});
  void digest_input(const UserInput& in);

  std::shared_ptr<const Scenario> scenario_;
  DifficultyLevel difficulty_;
  physics::World world_;
  std::vector<StepState> steps_;
  std::set<std::string> flags_;
  std::set<std::string> fired_;
  std::set<std::string> declared_flags_;
  std::vector<LogRecord> log_;
  std::optional<Pose> hand_;
  std::uint64_t input_digest_;
  // Filled by completions, skips and events; drained into the next frame.
  std::vector<std::string> pending_done_;
  std::vector<std::string> pending_fired_;
};

/// Builds the world for a scenario: one body per part, regions, friction
/// table and cables pinned to their anchors.
physics::World build_world(const Scenario& s, const physics::WorldConfig& base = {});

/// Smallest tick count n with n·dt ≥ seconds, robust to dt round-off.
std::uint64_t ticks_for(double seconds, double dt);

}  // namespace interact::session
