#pragma once

#include "interact/scene/diagnostic.hpp"
#include "interact/scene/types.hpp"

#include <set>
#include <string>
#include <vector>

namespace interact {

/// Static-semantics check. Returns an empty list iff every type invariant of
/// the scenario holds. Diagnostic locations use the logical path vocabulary
/// shared with the parser's source map ("part:<id>.shape", "step:<id>.requires").
std::vector<Diagnostic> validate_scenario(const Scenario& s);

/// Names set by any event's set_flag action. These are the only flags a
/// condition or trigger may reference.
std::set<std::string> declared_flags(const Scenario& s);

/// True when the hull vertex set spans three dimensions: at least four
/// vertices and smallest/largest singular value of the centered vertex
/// matrix above 1e-9.
bool hull_is_full_rank(const ConvexHull& hull);

struct Reachability {
  std::vector<std::string> reachable;    // scenario order
  std::vector<std::string> unreachable;  // scenario order
};

/// Monotone fixpoint over the unlock graph. Each round assumes every step
/// already marked reachable completes and every flag set by an event whose
/// trigger can occur is set, then marks any step whose requirement holds.
/// A step once marked stays marked, so negated atoms are judged against the
/// state at the round the step was first enabled.
Reachability reachability_check(const Scenario& s);

}  // namespace interact
