#include "interact/cable/cable.hpp"

#include "interact/error.hpp"

#include <algorithm>
#include <cmath>

namespace interact::cable {

Cable init_cable(std::string id, double total_length, int nodes, const Vec3& a, const Vec3& b) {
  if (nodes < 2 || !(total_length > 0.0)) {
    throw EngineError("E_BAD_CABLE", "cable '" + id + "' needs at least 2 nodes and a positive length");
  }
  if ((b - a).norm() > total_length) {
    throw EngineError("E_CABLE_TOO_SHORT", "cable '" + id + "' is shorter than the distance between its ends");
  }
  Cable c;
  c.id = std::move(id);
  c.rest_length = total_length / (nodes - 1);
  for (int i = 0; i < nodes; ++i) {
    const double t = static_cast<double>(i) / (nodes - 1);
    c.positions.push_back(a + (b - a) * t);
  }
  c.velocities.assign(c.positions.size(), Vec3::Zero());
  c.pins = {a, b};
  return c;
}

namespace {

constexpr int kPolishSteps = 4;

void apply_pins(Cable& c) {
  if (c.pins[0]) c.positions.front() = *c.pins[0];
  if (c.pins[1]) c.positions.back() = *c.pins[1];
}

double max_violation(const Cable& c) {
  double worst = 0.0;
  for (std::size_t s = 0; s + 1 < c.positions.size(); ++s) {
    worst = std::max(worst, std::abs((c.positions[s + 1] - c.positions[s]).norm() - c.rest_length));
  }
  return worst;
}

// Newton steps on the whole chain. The linearised system J·W·Jᵀ·Δλ = −C is
// tridiagonal and is solved exactly by eliminating left to right and
// substituting right to left. A step is kept only if it lowers the largest
// violation, so a poor linearisation leaves the sweep result untouched.
void polish(Cable& c, const std::vector<double>& w) {
  const std::size_t m = c.positions.size() - 1;
  std::vector<Vec3> dir(m);
  std::vector<double> diag(m), upper(m), rhs(m), dlam(m);
  double current = max_violation(c);
  for (int step = 0; step < kPolishSteps && current > 1e-12 * c.rest_length; ++step) {
    for (std::size_t s = 0; s < m; ++s) {
      const Vec3 d = c.positions[s + 1] - c.positions[s];
      const double len = d.norm();
      if (len <= 1e-12) return;
      dir[s] = d / len;
      rhs[s] = c.rest_length - len;
      diag[s] = w[s] + w[s + 1];
    }
    // Off-diagonals need the next segment's direction, so they come second.
    for (std::size_t s = 0; s < m; ++s) upper[s] = s + 1 < m ? -w[s + 1] * dir[s].dot(dir[s + 1]) : 0.0;
    for (std::size_t s = 1; s < m; ++s) {
      if (diag[s - 1] <= 1e-300) continue;
      const double f = upper[s - 1] / diag[s - 1];
      diag[s] -= f * upper[s - 1];
      rhs[s] -= f * rhs[s - 1];
    }
    for (std::size_t s = m; s-- > 0;) {
      const double carry = s + 1 < m ? upper[s] * dlam[s + 1] : 0.0;
      dlam[s] = diag[s] > 1e-300 ? (rhs[s] - carry) / diag[s] : 0.0;
    }
    const std::vector<Vec3> before = c.positions;
    for (std::size_t s = 0; s < m; ++s) {
      c.positions[s] -= dir[s] * (w[s] * dlam[s]);
      c.positions[s + 1] += dir[s] * (w[s + 1] * dlam[s]);
    }
    const double next = max_violation(c);
    if (!(next < current)) {
      c.positions = before;
      return;
    }
    current = next;
  }
}

}  // namespace

void step_cable(Cable& c, const CableParams& params) {
  const std::size_t n = c.positions.size();
  const std::size_t m = n - 1;
  const double dt = params.dt;
  const double keep = 1.0 - std::clamp(c.damping, 0.0, 1.0);
  const std::vector<Vec3> start = c.positions;
  for (std::size_t i = 0; i < n; ++i) {
    c.velocities[i] = c.velocities[i] * keep + params.gravity * dt;
    c.positions[i] += c.velocities[i] * dt;
  }
  apply_pins(c);

  std::vector<double> inv_mass(n, 1.0 / c.node_mass);
  if (c.pins[0]) inv_mass.front() = 0.0;
  if (c.pins[1]) inv_mass.back() = 0.0;

  // Segments whose nodes coincide after prediction have no direction. They
  // open as a fold: down over the first half, back up over the second, with
  // a slight sideways lean so a vertical column can buckle.
  const Vec3 down = params.gravity.norm() > 0.0 ? Vec3(params.gravity.normalized()) : Vec3(-Vec3::UnitZ());
  const Vec3 side = down.unitOrthogonal();
  std::vector<bool> fold(m, false);
  for (std::size_t s = 0; s < m; ++s) fold[s] = c.positions[s + 1] == c.positions[s];
  const auto fold_dir = [&](std::size_t s) -> Vec3 {
    if (2 * s + 1 == m) return side;
    return 2 * s + 1 < m ? Vec3((down + 0.1 * side).normalized()) : Vec3((-down + 0.1 * side).normalized());
  };

  const double alpha = c.compliance / (dt * dt);
  std::vector<double> lambda(m, 0.0);
  const auto project = [&](std::size_t s) {
    const double wa = inv_mass[s];
    const double wb = inv_mass[s + 1];
    if (wa + wb <= 0.0) return;
    const Vec3 d = c.positions[s + 1] - c.positions[s];
    Vec3 g;
    double len = 0.0;
    if (fold[s]) {
      g = fold_dir(s);
      len = d.dot(g);
    } else {
      len = d.norm();
      if (len <= 0.0) return;
      g = d / len;
    }
    const double dl = (c.rest_length - len - alpha * lambda[s]) / (wa + wb + alpha);
    lambda[s] += dl;
    c.positions[s] -= g * (dl * wa);
    c.positions[s + 1] += g * (dl * wb);
  };
  for (int it = 0; it < params.iterations; ++it) {
    for (std::size_t s = 0; s < m; ++s) project(s);
    for (std::size_t s = m; s-- > 0;) project(s);
  }
  if (c.compliance == 0.0) polish(c, inv_mass);
  apply_pins(c);
  for (std::size_t i = 0; i < n; ++i) c.velocities[i] = (c.positions[i] - start[i]) / dt;
}

double max_strain(const Cable& c) { return max_violation(c) / c.rest_length; }

double arc_length(const Cable& c) {
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < c.positions.size(); ++s) total += (c.positions[s + 1] - c.positions[s]).norm();
  return total;
}

StaticSolveReport static_solve(Cable& c, const CableParams& params) {
  if (!c.pins[0] || !c.pins[1]) throw EngineError("E_BAD_CABLE", "static solve needs both cable ends pinned");
  c.damping = 0.99;
  StaticSolveReport rep;
  while (rep.ticks < 100000) {
    step_cable(c, params);
    ++rep.ticks;
    double fastest = 0.0;
    for (const auto& v : c.velocities) fastest = std::max(fastest, v.norm());
    rep.max_node_speed = fastest;
    if (fastest < 1e-5) {
      rep.converged = true;
      break;
    }
  }
  rep.max_strain = max_strain(c);
  return rep;
}

}  // namespace interact::cable
