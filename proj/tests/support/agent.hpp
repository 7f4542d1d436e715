#pragma once

#include "interact/replay/replay.hpp"
#include "interact/session/session.hpp"

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace testing_support {

struct AgentPlan {
  std::map<std::string, int> hints;  // hints to request as soon as the step is worked on
  std::set<std::string> skips;       // steps to skip instead of doing
  /// Extra ticks to idle before starting each step (adds to its duration).
  std::map<std::string, std::uint64_t> delay;
};

struct AgentRun {
  std::vector<interact::replay::TraceRecord> records;
  interact::session::ScoreReport report;
  std::uint64_t ticks = 0;
  std::uint64_t final_hash = 0;
  bool finished = false;
};

/// Closed-loop scripted player. Works on the first active step in scenario
/// order: presses action buttons, carries placing parts straight onto the
/// target anchor, and holds tools against their target. Tools are parked
/// back at their initial pose, held still for one tick, then released.
AgentRun run_agent(std::shared_ptr<const interact::Scenario> scenario, const std::string& difficulty,
                   const AgentPlan& plan = {}, std::uint64_t max_ticks = 20000);

}  // namespace testing_support
