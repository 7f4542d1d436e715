#include "interact/scene/condition.hpp"

namespace interact {

bool evaluate_condition(const Cond& e, const NamePredicate& is_completed, const NamePredicate& is_flag_set) {
  switch (e.kind) {
    case Cond::Kind::kStart:
      return true;
    case Cond::Kind::kDone:
      return is_completed(e.name);
    case Cond::Kind::kFlag:
      return is_flag_set(e.name);
    case Cond::Kind::kNot:
      return !evaluate_condition(e.children.front(), is_completed, is_flag_set);
    case Cond::Kind::kAnd:
      for (const auto& c : e.children) {
        if (!evaluate_condition(c, is_completed, is_flag_set)) return false;
      }
      return true;
    case Cond::Kind::kOr:
      for (const auto& c : e.children) {
        if (evaluate_condition(c, is_completed, is_flag_set)) return true;
      }
      return false;
  }
  return false;
}

bool evaluate_condition(const Cond& e, const std::set<std::string>& completed, const std::set<std::string>& flags) {
  return evaluate_condition(
      e, [&](std::string_view s) { return completed.count(std::string(s)) > 0; },
      [&](std::string_view f) { return flags.count(std::string(f)) > 0; });
}

void for_each_atom(const Cond& e, const std::function<void(const Cond&)>& fn) {
  if (e.kind == Cond::Kind::kDone || e.kind == Cond::Kind::kFlag) {
    fn(e);
    return;
  }
  for (const auto& c : e.children) for_each_atom(c, fn);
}

}  // namespace interact
