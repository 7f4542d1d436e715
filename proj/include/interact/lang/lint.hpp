#pragma once

#include "interact/scene/diagnostic.hpp"
#include "interact/scene/types.hpp"

#include <vector>

namespace interact::lang {

/// validate_scenario output followed by graph and authoring checks:
/// E_CYCLE_ONLY_DEADLOCK for unreachable steps that sit on a Done-cycle
/// (one diagnostic per cycle, listing its ids), W_UNREACHABLE_STEP for the
/// remaining unreachable steps, W_UNUSED_PART and W_NO_HINT.
///
/// A part counts as used when a step, event, region or cable names it,
/// including as the owner of a target anchor.
std::vector<Diagnostic> lint(const Scenario& s);

/// The checks lint adds on top of validate_scenario. Pass `valid` = false
/// when validation failed; the graph checks are then skipped.
std::vector<Diagnostic> lint_checks(const Scenario& s, bool valid);

}  // namespace interact::lang
