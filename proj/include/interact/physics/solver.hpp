#pragma once

#include "interact/physics/body.hpp"

#include <vector>

namespace interact::physics {

struct SolverConfig {
  int iterations = 8;
  double baumgarte = 0.2;  // 0 disables positional bias
  double slop = 1e-3;      // m
  double dt = 1.0 / 120.0;
};

/// Sequential impulses with accumulated clamping, restitution 0 and a
/// Coulomb friction disc |j_t| ≤ μ·j_n. Contacts are processed in the given
/// order on every iteration; only dynamic bodies receive impulses.
void solve_contacts(std::vector<RigidBody>& bodies, const std::vector<Contact>& contacts, const SolverConfig& cfg);

}  // namespace interact::physics
