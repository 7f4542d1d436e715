#include "interact/session/wire.hpp"

#include "interact/error.hpp"

namespace interact::session {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw EngineError("E_BAD_INPUT", msg); }

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) bad(std::string("missing field '") + name + "'");
  return j.at(name);
}

std::string text(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_string()) bad(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

double number(const Json& v) {
  if (!v.is_number()) bad("expected a number");
  return v.get<double>();
}

}  // namespace

Json pose_to_json(const Pose& p) {
  const Quat& q = p.orientation;
  return {{"pos", {p.position.x(), p.position.y(), p.position.z()}}, {"quat", {q.w(), q.x(), q.y(), q.z()}}};
}

Pose pose_from_json(const Json& j) {
  const Json& pos = field(j, "pos");
  const Json& quat = field(j, "quat");
  if (!pos.is_array() || pos.size() != 3) bad("'pos' must be [x, y, z]");
  if (!quat.is_array() || quat.size() != 4) bad("'quat' must be [w, x, y, z]");
  return {Vec3(number(pos[0]), number(pos[1]), number(pos[2])),
          Quat(number(quat[0]), number(quat[1]), number(quat[2]), number(quat[3]))};
}

Json input_to_json(const UserInput& in) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, HandPose>) {
          Json j = pose_to_json(v.pose);
          j["kind"] = "hand_pose";
          return j;
        } else if constexpr (std::is_same_v<T, Grab>) {
          return {{"kind", "grab"}, {"part", v.part}};
        } else if constexpr (std::is_same_v<T, Release>) {
          return {{"kind", "release"}};
        } else if constexpr (std::is_same_v<T, Press>) {
          return {{"kind", "press"}, {"action_id", v.action_id}};
        } else if constexpr (std::is_same_v<T, HintRequest>) {
          return {{"kind", "hint"}, {"step", v.step}};
        } else if constexpr (std::is_same_v<T, SkipRequest>) {
          return {{"kind", "skip"}, {"step", v.step}};
        } else {
          return {{"kind", "set_flag"}, {"name", v.name}};
        }
      },
      in);
}

UserInput input_from_json(const Json& j) {
  const std::string kind = text(j, "kind");
  if (kind == "hand_pose") return HandPose{pose_from_json(j)};
  if (kind == "grab") return Grab{text(j, "part")};
  if (kind == "release") return Release{};
  if (kind == "press") return Press{text(j, "action_id")};
  if (kind == "hint") return HintRequest{text(j, "step")};
  if (kind == "skip") return SkipRequest{text(j, "step")};
  if (kind == "set_flag") return SetFlag{text(j, "name")};
  bad("unknown input kind '" + kind + "'");
}

Json helper_to_json(const StepHelper& h) {
  Json j = {{"step", h.step}};
  if (h.ghost) j["ghost"] = pose_to_json(*h.ghost);
  if (!h.trajectory.empty()) {
    Json pts = Json::array();
    for (const auto& p : h.trajectory) pts.push_back(pose_to_json(p));
    j["trajectory"] = std::move(pts);
  }
  if (h.instruction) j["instruction"] = *h.instruction;
  if (h.hint) j["hint"] = *h.hint;
  return j;
}

Json frame_to_json(const FrameReport& f) {
  Json helpers = Json::array();
  for (const auto& h : f.helpers) helpers.push_back(helper_to_json(h));
  return {{"tick", f.tick},
          {"helpers", std::move(helpers)},
          {"newly_completed", f.newly_completed},
          {"fired_events", f.fired_events},
          {"score_partial", f.score_partial}};
}

Json score_to_json(const ScoreReport& r) {
  Json steps = Json::array();
  for (const auto& s : r.steps) {
    steps.push_back({{"id", s.id},
                     {"kind", s.kind},
                     {"status", s.status},
                     {"base", kBaseScore},
                     {"duration", s.duration},
                     {"par", s.par},
                     {"time_factor", s.time_factor},
                     {"accuracy_factor", s.accuracy_factor},
                     {"hints", s.hints},
                     {"hint_penalty", s.hint_penalty},
                     {"residual", {{"d_pos", s.residual.d_pos}, {"d_rot", s.residual.d_rot}}},
                     {"skipped", s.skipped},
                     {"incomplete", s.incomplete},
                     {"step_score", s.step_score}});
  }
  return {{"scenario", r.scenario},
          {"difficulty", r.difficulty},
          {"abandoned", r.abandoned},
          {"steps", std::move(steps)},
          {"total", r.total}};
}

}  // namespace interact::session
