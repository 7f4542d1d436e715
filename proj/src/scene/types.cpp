#include "interact/scene/types.hpp"

#include <algorithm>

namespace interact {

const Anchor* PartDef::find_anchor(std::string_view name) const {
  for (const auto& a : anchors) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

Cond Cond::combine(Kind kind, std::vector<Cond> cs) {
  Cond out{kind, {}, {}};
  for (auto& c : cs) {
    if (c.kind == kind) {
      for (auto& g : c.children) out.children.push_back(std::move(g));
    } else {
      out.children.push_back(std::move(c));
    }
  }
  return out;
}

const char* StepDef::kind_name() const {
  switch (kind.index()) {
    case 0:
      return "placing";
    case 1:
      return "action";
    default:
      return "tooluse";
  }
}

namespace {

template <typename T>
const T* find_by_id(const std::vector<T>& items, std::string_view id) {
  auto it = std::find_if(items.begin(), items.end(), [&](const T& x) { return x.id == id; });
  return it == items.end() ? nullptr : &*it;
}

}  // namespace

const PartDef* Scenario::find_part(std::string_view id) const { return find_by_id(parts, id); }
const StepDef* Scenario::find_step(std::string_view id) const { return find_by_id(steps, id); }
const Region* Scenario::find_region(std::string_view id) const { return find_by_id(regions, id); }
const DifficultyLevel* Scenario::find_difficulty(std::string_view id) const {
  return find_by_id(difficulties, id);
}

std::optional<std::size_t> Scenario::step_index(std::string_view id) const {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].id == id) return i;
  }
  return std::nullopt;
}

DifficultyLevel default_difficulty() {
  DifficultyLevel d;
  d.id = kDefaultDifficultyId;
  return d;
}

std::vector<DifficultyLevel> Scenario::difficulties_or_default() const {
  if (!difficulties.empty()) return difficulties;
  return {default_difficulty()};
}

double Scenario::friction(std::string_view mat_a, std::string_view mat_b) const {
  for (const auto& m : materials) {
    if ((m.a == mat_a && m.b == mat_b) || (m.a == mat_b && m.b == mat_a)) return m.mu;
  }
  return kDefaultFriction;
}

}  // namespace interact
