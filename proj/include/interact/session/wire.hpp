#pragma once

#include "interact/session/score.hpp"
#include "interact/session/session.hpp"

#include "json.hpp"

namespace interact::session {

using Json = nlohmann::json;

/// {"pos":[x,y,z],"quat":[w,x,y,z]}
Json pose_to_json(const Pose& p);
/// Throws E_BAD_INPUT on missing fields or wrong arity. The quaternion is
/// taken as given; sessions normalize hand poses on arrival.
Pose pose_from_json(const Json& j);

/// Input encodings, keyed by "kind":
///   hand_pose {pos, quat} | grab {part} | release | press {action_id}
///   hint {step} | skip {step} | set_flag {name}
Json input_to_json(const UserInput& in);
/// Throws E_BAD_INPUT.
UserInput input_from_json(const Json& j);

Json helper_to_json(const StepHelper& h);
Json frame_to_json(const FrameReport& f);
Json score_to_json(const ScoreReport& r);

}  // namespace interact::session
