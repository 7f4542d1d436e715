#pragma once

#include "interact/math.hpp"
#include "interact/scene/types.hpp"

#include <string>

namespace interact::physics {

/// Rigid body whose origin is its centre of rotation. `mass == 0` marks a
/// static body; grabbed and welded bodies are driven rather than simulated.
struct RigidBody {
  std::string id;
  ColliderShape shape = Sphere{0.1};
  std::string material = "default";
  Pose pose;
  Vec3 linear_velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();
  double mass = 0.0;
  Mat3 inertia = Mat3::Identity();  // body frame
  bool grabbable = false;
  bool active = true;
  bool grabbed = false;
  bool welded = false;

  bool is_static() const { return mass <= 0.0; }
  bool kinematic() const { return is_static() || grabbed; }
  /// Integrated and pushed by the solver.
  bool dynamic() const { return active && !is_static() && !grabbed && !welded; }

  double inverse_mass() const { return dynamic() ? 1.0 / mass : 0.0; }
  Mat3 inverse_inertia_world() const {
    if (!dynamic()) return Mat3::Zero();
    const Mat3 r = pose.orientation.toRotationMatrix();
    return r * inertia.inverse() * r.transpose();
  }
  Vec3 point_velocity(const Vec3& world_point) const {
    return linear_velocity + angular_velocity.cross(world_point - pose.position);
  }
};

struct Contact {
  std::string body_a;  // body_a < body_b
  std::string body_b;
  std::size_t index_a = 0;
  std::size_t index_b = 0;
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();  // from body_a towards body_b
  double depth = 0.0;
  double friction = 0.5;
  bool degenerate = false;
};

}  // namespace interact::physics
