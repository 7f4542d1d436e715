#pragma once

#include "interact/scene/types.hpp"

#include <string>

namespace interact::lang {

/// Graphviz digraph of the unlock structure. Step nodes come first in
/// declaration order, then one box node per event. Each Done atom in a
/// requirement adds a solid edge dependency -> step; event triggers and
/// step-affecting actions add dashed edges.
std::string export_graph_dot(const Scenario& s);

}  // namespace interact::lang
