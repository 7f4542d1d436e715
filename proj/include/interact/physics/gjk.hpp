#pragma once

#include "interact/physics/shape.hpp"

#include <optional>

namespace interact::physics {

/// Closest features of two convex cores, margins ignored.
struct GjkResult {
  bool intersecting = false;  // cores overlap or touch (distance ≤ 1e-10)
  double distance = 0.0;
  Vec3 point_a = Vec3::Zero();  // closest point on core A
  Vec3 point_b = Vec3::Zero();
  int iterations = 0;
};

GjkResult gjk_distance(const ConvexCore& a, const ConvexCore& b);

/// Penetration of two overlapping cores, margins ignored. `normal` points
/// from A towards B: translating B by depth·normal brings the cores into
/// touching contact.
struct EpaResult {
  Vec3 normal = Vec3::UnitZ();
  double depth = 0.0;
  Vec3 point_a = Vec3::Zero();  // deepest core point of A along normal
  Vec3 point_b = Vec3::Zero();
  bool converged = true;  // false after 64 expansions; result is the last face
};

/// Empty when the Minkowski difference is flat (both cores are points or
/// segments), where penetration is undefined.
std::optional<EpaResult> epa_penetration(const ConvexCore& a, const ConvexCore& b);

}  // namespace interact::physics
