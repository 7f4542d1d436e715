#pragma once

#include "interact/math.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace interact::cable {

struct CableParams {
  int iterations = 20;
  double dt = 1.0 / 120.0;
  Vec3 gravity{0.0, 0.0, -9.81};
};

/// Chain of point masses joined by distance constraints. Node 0 and node
/// N−1 are pinned while `pins[0]` / `pins[1]` hold a world position.
struct Cable {
  std::string id;
  std::vector<Vec3> positions;
  std::vector<Vec3> velocities;
  double rest_length = 0.0;  // per segment; total = (N−1)·rest_length
  double node_mass = 0.05;
  double compliance = 0.0;  // m/N
  double damping = 0.0;     // fraction of velocity removed per tick, in [0, 1]
  std::array<std::optional<Vec3>, 2> pins;

  std::size_t node_count() const { return positions.size(); }
  double total_length() const { return rest_length * static_cast<double>(positions.size() - 1); }
};

/// Taut chain of `nodes` nodes interpolated between a and b, both ends
/// pinned. Throws EngineError E_CABLE_TOO_SHORT when |a−b| exceeds the
/// length and E_BAD_CABLE when nodes < 2 or length ≤ 0.
Cable init_cable(std::string id, double total_length, int nodes, const Vec3& a, const Vec3& b);

/// One position-based tick: predict under gravity with damping, pin, project
/// constraints left→right then right→left per iteration (XPBD, λ reset per
/// tick), pin again, derive velocities from the position change.
void step_cable(Cable& c, const CableParams& params);

struct StaticSolveReport {
  bool converged = false;
  long ticks = 0;
  double max_strain = 0.0;      // max |segment − rest| / rest
  double max_node_speed = 0.0;  // m/s
};

/// Steps with damping 0.99 until every node is slower than 1e-5 m/s or
/// 10⁵ ticks elapse. Both ends must be pinned (E_BAD_CABLE otherwise).
StaticSolveReport static_solve(Cable& c, const CableParams& params);

double max_strain(const Cable& c);
double arc_length(const Cable& c);

}  // namespace interact::cable
