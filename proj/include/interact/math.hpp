#pragma once

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

namespace interact {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Rigid transform. Orientation is a unit quaternion stored (w, x, y, z).
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  Pose() = default;
  Pose(const Vec3& p, const Quat& q) : position(p), orientation(q) {}

  static Pose identity() { return {}; }
  static Pose from_position(const Vec3& p) { return {p, Quat::Identity()}; }

  /// this ∘ other: apply `other` first, then `this`.
  Pose operator*(const Pose& other) const {
    Quat q = orientation * other.orientation;
    q.normalize();
    return {position + orientation * other.position, q};
  }

  Pose inverse() const {
    const Quat qi = orientation.conjugate();
    return {-(qi * position), qi};
  }

  Vec3 transform_point(const Vec3& p) const { return position + orientation * p; }
  Vec3 inverse_transform_point(const Vec3& p) const { return orientation.conjugate() * (p - position); }

  bool operator==(const Pose& o) const {
    return position == o.position && orientation.coeffs() == o.orientation.coeffs();
  }
};

/// Roll about x, then pitch about y, then yaw about z (all radians).
inline Quat quat_from_rpy(double roll, double pitch, double yaw) {
  Quat q = Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
           Eigen::AngleAxisd(roll, Vec3::UnitX());
  q.normalize();
  return q;
}

/// Rotation angle between two unit quaternions, in [0, π]. The q ≡ −q double
/// cover is folded by taking |w| of the relative rotation.
inline double rotation_angle_between(const Quat& a, const Quat& b) {
  const Quat rel = a.conjugate() * b;
  const double s = rel.vec().norm();
  const double c = std::abs(rel.w());
  return 2.0 * std::atan2(s, c);
}

/// Exponential-map integration of a world-frame angular velocity.
inline Quat integrate_rotation(const Quat& q, const Vec3& omega, double dt) {
  const double angle = omega.norm() * dt;
  Quat dq = Quat::Identity();
  if (angle > 0.0) {
    dq = Quat(Eigen::AngleAxisd(angle, omega.normalized()));
  }
  Quat out = dq * q;
  out.normalize();
  return out;
}

inline bool is_finite(const Vec3& v) { return v.allFinite(); }
inline bool is_finite(const Quat& q) { return q.coeffs().allFinite(); }

}  // namespace interact
