#pragma once

#include "interact/physics/body.hpp"

#include <utility>
#include <vector>

namespace interact::physics {

inline constexpr double kBroadphaseMargin = 0.01;

/// Sweep and prune along x over active bodies' world AABBs inflated by
/// `margin`. Returns index pairs (i < j) whose inflated boxes overlap on all
/// three axes, sorted lexicographically. With `bodies` sorted by id this is
/// the lexicographic order of the id pairs.
std::vector<std::pair<std::size_t, std::size_t>> broadphase_pairs(const std::vector<RigidBody>& bodies,
                                                                  double margin = kBroadphaseMargin);

}  // namespace interact::physics
