#include "interact/physics/solver.hpp"

#include <algorithm>
#include <cmath>

namespace interact::physics {
namespace {

struct Row {
  Vec3 ra;
  Vec3 rb;
  Vec3 n;
  Vec3 t1;
  Vec3 t2;
  double mass_n = 0.0;
  double mass_t1 = 0.0;
  double mass_t2 = 0.0;
  double bias = 0.0;
  double mu = 0.0;
  double jn = 0.0;
  double jt1 = 0.0;
  double jt2 = 0.0;
};

double effective_mass(const RigidBody& a, const RigidBody& b, const Mat3& ia, const Mat3& ib, const Vec3& ra,
                      const Vec3& rb, const Vec3& dir) {
  const Vec3 ca = ra.cross(dir);
  const Vec3 cb = rb.cross(dir);
  const double k = a.inverse_mass() + b.inverse_mass() + ca.dot(ia * ca) + cb.dot(ib * cb);
  return k > 0.0 ? 1.0 / k : 0.0;
}

void apply(RigidBody& a, RigidBody& b, const Mat3& ia, const Mat3& ib, const Row& r, const Vec3& impulse) {
  a.linear_velocity -= impulse * a.inverse_mass();
  a.angular_velocity -= ia * r.ra.cross(impulse);
  b.linear_velocity += impulse * b.inverse_mass();
  b.angular_velocity += ib * r.rb.cross(impulse);
}

}  // namespace

void solve_contacts(std::vector<RigidBody>& bodies, const std::vector<Contact>& contacts, const SolverConfig& cfg) {
  std::vector<Row> rows;
  std::vector<Mat3> inv_inertia(bodies.size());
  for (std::size_t i = 0; i < bodies.size(); ++i) inv_inertia[i] = bodies[i].inverse_inertia_world();

  rows.reserve(contacts.size());
  for (const auto& c : contacts) {
    const RigidBody& a = bodies[c.index_a];
    const RigidBody& b = bodies[c.index_b];
    Row r;
    r.ra = c.point - a.pose.position;
    r.rb = c.point - b.pose.position;
    r.n = c.normal;
    r.t1 = c.normal.unitOrthogonal();
    r.t2 = c.normal.cross(r.t1);
    const Mat3& ia = inv_inertia[c.index_a];
    const Mat3& ib = inv_inertia[c.index_b];
    r.mass_n = effective_mass(a, b, ia, ib, r.ra, r.rb, r.n);
    r.mass_t1 = effective_mass(a, b, ia, ib, r.ra, r.rb, r.t1);
    r.mass_t2 = effective_mass(a, b, ia, ib, r.ra, r.rb, r.t2);
    r.bias = cfg.baumgarte / cfg.dt * std::max(0.0, c.depth - cfg.slop);
    r.mu = c.friction;
    rows.push_back(r);
  }

  for (int it = 0; it < cfg.iterations; ++it) {
    for (std::size_t k = 0; k < contacts.size(); ++k) {
      Row& r = rows[k];
      RigidBody& a = bodies[contacts[k].index_a];
      RigidBody& b = bodies[contacts[k].index_b];
      const Mat3& ia = inv_inertia[contacts[k].index_a];
      const Mat3& ib = inv_inertia[contacts[k].index_b];

      // Normal: the closing velocity plus bias is removed, never pulled.
      Vec3 dv = b.point_velocity(b.pose.position + r.rb) - a.point_velocity(a.pose.position + r.ra);
      const double jn_new = std::max(0.0, r.jn + r.mass_n * (-dv.dot(r.n) + r.bias));
      const double djn = jn_new - r.jn;
      r.jn = jn_new;
      apply(a, b, ia, ib, r, r.n * djn);

      // Friction: both tangents, then clamp the accumulated pair to the disc.
      dv = b.point_velocity(b.pose.position + r.rb) - a.point_velocity(a.pose.position + r.ra);
      double jt1 = r.jt1 - r.mass_t1 * dv.dot(r.t1);
      double jt2 = r.jt2 - r.mass_t2 * dv.dot(r.t2);
      const double limit = r.mu * r.jn;
      const double mag = std::hypot(jt1, jt2);
      if (mag > limit) {
        const double s = mag > 0.0 ? limit / mag : 0.0;
        jt1 *= s;
        jt2 *= s;
      }
      const Vec3 dj = r.t1 * (jt1 - r.jt1) + r.t2 * (jt2 - r.jt2);
      r.jt1 = jt1;
      r.jt2 = jt2;
      apply(a, b, ia, ib, r, dj);
    }
  }
}

}  // namespace interact::physics
