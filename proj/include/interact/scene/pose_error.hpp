#pragma once

#include "interact/math.hpp"

namespace interact {

struct PoseError {
  double d_pos = 0.0;  // m
  double d_rot = 0.0;  // rad, in [0, π]
};

/// Distance between two poses. d_rot is 2·acos(|⟨qa, qb⟩|), evaluated through
/// atan2 of the relative rotation so it stays accurate near zero.
inline PoseError pose_error(const Pose& a, const Pose& b) {
  return {(a.position - b.position).norm(), rotation_angle_between(a.orientation, b.orientation)};
}

}  // namespace interact
