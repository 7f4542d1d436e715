#include "agent.hpp"

#include "interact/replay/hash.hpp"

#include <optional>

namespace testing_support {

using namespace interact;
using namespace interact::session;

namespace {

std::optional<std::size_t> first_active(const Session& s) {
  for (std::size_t i = 0; i < s.steps().size(); ++i) {
    if (s.steps()[i].status == StepStatus::kActive) return i;
  }
  return std::nullopt;
}

}  // namespace

AgentRun run_agent(std::shared_ptr<const Scenario> scenario, const std::string& difficulty, const AgentPlan& plan,
                   std::uint64_t max_ticks) {
  Session s(scenario, difficulty);
  AgentRun out;

  std::map<std::string, Pose> initial;
  for (const auto& b : s.world().bodies()) initial[b.id] = b.pose;
  std::map<std::string, int> hinted;
  bool releasing = false;

  for (std::uint64_t t = 0; t < max_ticks && !s.finished(); ++t) {
    std::vector<UserInput> in;
    const auto emit = [&](UserInput u) {
      out.records.push_back({t, u});
      in.push_back(std::move(u));
    };

    if (releasing) {
      // The hand has been still for a tick, so the parked tool has no velocity.
      emit(Release{});
      releasing = false;
    } else if (const auto idx = first_active(s)) {
      const StepDef& def = scenario->steps[*idx];
      const StepState& st = s.steps()[*idx];
      const auto delay = plan.delay.count(def.id) ? plan.delay.at(def.id) : 0;
      const auto wanted_hints = plan.hints.count(def.id) ? plan.hints.at(def.id) : 0;

      if (s.tick_count() - st.activated_tick < delay) {
        // idle
      } else if (plan.skips.count(def.id)) {
        emit(SkipRequest{def.id});
      } else {
        while (hinted[def.id] < wanted_hints) {
          emit(HintRequest{def.id});
          ++hinted[def.id];
        }
        std::string want;
        Pose desired;
        if (const auto* a = std::get_if<ActionStep>(&def.kind)) {
          emit(Press{a->action_id});
        } else if (const auto* p = std::get_if<PlacingStep>(&def.kind)) {
          want = p->part;
          desired = s.placing_target(*p);
        } else if (const auto* tu = std::get_if<ToolUseStep>(&def.kind)) {
          want = tu->tool;
          const auto* target = s.world().find(tu->target);
          desired = Pose(target->pose.position + Vec3(0.0, 0.0, 0.005), initial.at(tu->tool).orientation);
        }
        if (!want.empty()) {
          const auto held = s.grabbed_part();
          if (held && *held != want) {
            const Pose offset = s.world().grabs().at(*held).offset;
            emit(HandPose{initial.at(*held) * offset.inverse()});
            releasing = true;
          } else if (!held) {
            emit(HandPose{s.world().find(want)->pose});
            emit(Grab{want});
          } else {
            // A tracked hand reports every frame, still or not, so the trace
            // covers every tick up to the last completion.
            emit(HandPose{desired * s.world().grabs().at(want).offset.inverse()});
          }
        }
      }
    }
    s.tick(in);
  }

  out.finished = s.finished();
  out.report = s.finalize(!s.finished());
  out.ticks = s.tick_count();
  out.final_hash = replay::state_hash(s);
  return out;
}

}  // namespace testing_support
