#pragma once

#include "interact/physics/shape.hpp"

#include <optional>
#include <vector>

namespace interact::physics {

struct ContactPoint {
  Vec3 point = Vec3::Zero();  // midpoint of the closest features
  Vec3 normal = Vec3::UnitZ();  // unit, from A towards B
  double depth = 0.0;  // ≥ 0
  bool degenerate = false;  // EPA hit its iteration cap; depth is from the last face
};

/// Single contact between two posed shapes, or empty when separated.
/// Sphere–sphere and sphere–box are analytic, box–box uses the separating
/// axis test, everything involving a capsule or hull goes through GJK/EPA.
/// Arguments are put in a canonical order internally, so swapping A and B
/// negates the normal and leaves depth and point bit-identical.
std::optional<ContactPoint> collide_pair(const ColliderShape& a, const Pose& pa, const ColliderShape& b,
                                         const Pose& pb);

/// Contact manifold for the solver: up to 8 clipped points for box–box
/// face contacts, capsule end caps in addition to the GJK point, otherwise
/// the single collide_pair contact.
std::vector<ContactPoint> collide_manifold(const ColliderShape& a, const Pose& pa, const ColliderShape& b,
                                           const Pose& pb);

/// Separation distance between the shape surfaces; 0 when they touch or
/// overlap.
double shape_distance(const ColliderShape& a, const Pose& pa, const ColliderShape& b, const Pose& pb);

/// Closest points of segments p1q1 and p2q2.
void closest_points_segments(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2, Vec3& c1, Vec3& c2);

}  // namespace interact::physics
