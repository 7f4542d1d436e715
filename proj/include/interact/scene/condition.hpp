#pragma once

#include "interact/scene/types.hpp"

#include <functional>
#include <set>
#include <string>
#include <string_view>

namespace interact {

using NamePredicate = std::function<bool(std::string_view)>;

/// Standard boolean semantics: Start is true, Done(x) holds iff x is
/// completed, Flag(f) holds iff f is set.
bool evaluate_condition(const Cond& e, const NamePredicate& is_completed, const NamePredicate& is_flag_set);

bool evaluate_condition(const Cond& e, const std::set<std::string>& completed, const std::set<std::string>& flags);

/// Visits every Done/Flag atom in the expression, left to right.
void for_each_atom(const Cond& e, const std::function<void(const Cond&)>& fn);

}  // namespace interact
