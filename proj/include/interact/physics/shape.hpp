#pragma once

#include "interact/math.hpp"
#include "interact/scene/types.hpp"

#include <array>
#include <vector>

namespace interact::physics {

struct Aabb {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();

  bool overlaps(const Aabb& o) const {
    return lo.x() <= o.hi.x() && o.lo.x() <= hi.x() && lo.y() <= o.hi.y() && o.lo.y() <= hi.y() &&
           lo.z() <= o.hi.z() && o.lo.z() <= hi.z();
  }
  Aabb inflated(double m) const { return {lo - Vec3::Constant(m), hi + Vec3::Constant(m)}; }
};

Aabb world_aabb(const ColliderShape& shape, const Pose& pose);

/// Shape as a convex core plus a spherical margin: a sphere is its centre
/// plus radius, a capsule its axis segment plus radius, boxes and hulls have
/// zero margin. Core vertices are in world space.
struct ConvexCore {
  std::vector<Vec3> vertices;
  double margin = 0.0;

  Vec3 support(const Vec3& dir) const;
  /// Number of affinely independent directions spanned by the core (0..3).
  int dimension() const;
};

ConvexCore make_core(const ColliderShape& shape, const Pose& pose);

struct MassProperties {
  double mass = 0.0;
  double volume = 0.0;
  Mat3 inertia = Mat3::Zero();  // body frame, about the part origin
};

/// Uniform-density mass properties. Rotation is about the part origin, so
/// hull inertia is integrated about the origin rather than the centroid.
MassProperties mass_properties(const ColliderShape& shape, double mass);

/// Outward-facing triangles of a hull, coplanar facets fanned from their
/// own 2-D convex hull.
struct HullFace {
  Vec3 normal;
  double offset = 0.0;  // normal · x = offset on the plane
};
std::vector<HullFace> hull_planes(const std::vector<Vec3>& vertices);
std::vector<std::array<Vec3, 3>> hull_triangles(const std::vector<Vec3>& vertices);

}  // namespace interact::physics
