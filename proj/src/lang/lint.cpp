#include "interact/lang/lint.hpp"

#include "interact/scene/condition.hpp"
#include "interact/scene/validate.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace interact::lang {
namespace {

std::set<std::string> referenced_parts(const Scenario& s) {
  std::set<std::string> used;
  for (const auto& st : s.steps) {
    if (const auto* pl = std::get_if<PlacingStep>(&st.kind)) {
      used.insert(pl->part);
      used.insert(pl->target_part);
    } else if (const auto* tu = std::get_if<ToolUseStep>(&st.kind)) {
      used.insert(tu->tool);
      used.insert(tu->target);
    }
  }
  for (const auto& ev : s.events) {
    if (ev.trigger.kind == Trigger::Kind::kEntered) used.insert(ev.trigger.subject);
    for (const auto& a : ev.actions) {
      if (a.kind == EventAction::Kind::kSetFlag) continue;
      used.insert(a.target);
      if (a.kind == EventAction::Kind::kWeld) used.insert(a.parent);
    }
  }
  for (const auto& r : s.regions) {
    if (r.parent) used.insert(*r.parent);
  }
  for (const auto& c : s.cables) {
    used.insert(c.from.part);
    used.insert(c.to.part);
  }
  return used;
}

// Strongly connected components of the Done-edge graph restricted to
// `nodes`, keeping those that contain a cycle. Members and components are
// in scenario order.
std::vector<std::vector<std::string>> cyclic_components(const Scenario& s, const std::set<std::string>& nodes) {
  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& st : s.steps) {
    if (!nodes.count(st.id)) continue;
    for_each_atom(st.requirement, [&](const Cond& atom) {
      if (atom.kind == Cond::Kind::kDone && nodes.count(atom.name)) succ[atom.name].push_back(st.id);
    });
  }

  std::map<std::string, int> index;
  std::map<std::string, int> low;
  std::set<std::string> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> comps;
  int counter = 0;

  std::function<void(const std::string&)> visit = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const auto& w : succ[v]) {
      if (!index.count(w)) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack.count(w)) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] != index[v]) return;
    std::vector<std::string> comp;
    std::string w;
    do {
      w = stack.back();
      stack.pop_back();
      on_stack.erase(w);
      comp.push_back(w);
    } while (w != v);
    const auto& out = succ[v];
    const bool self_loop = std::find(out.begin(), out.end(), v) != out.end();
    if (comp.size() > 1 || self_loop) comps.push_back(std::move(comp));
  };

  for (const auto& st : s.steps) {
    if (nodes.count(st.id) && !index.count(st.id)) visit(st.id);
  }

  const auto order = [&](const std::string& id) { return *s.step_index(id); };
  for (auto& c : comps) {
    std::sort(c.begin(), c.end(), [&](const auto& a, const auto& b) { return order(a) < order(b); });
  }
  std::sort(comps.begin(), comps.end(), [&](const auto& a, const auto& b) { return order(a.front()) < order(b.front()); });
  return comps;
}

}  // namespace

std::vector<Diagnostic> lint(const Scenario& s) {
  std::vector<Diagnostic> out = validate_scenario(s);
  auto extra = lint_checks(s, !has_errors(out));
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

std::vector<Diagnostic> lint_checks(const Scenario& s, bool valid) {
  std::vector<Diagnostic> out;
  // Graph checks assume references resolve.
  if (valid) {
    const Reachability r = reachability_check(s);
    const std::set<std::string> unreachable(r.unreachable.begin(), r.unreachable.end());
    std::set<std::string> in_cycle;
    for (const auto& comp : cyclic_components(s, unreachable)) {
      std::string ids;
      for (const auto& id : comp) {
        if (!ids.empty()) ids += ", ";
        ids += id;
        in_cycle.insert(id);
      }
      out.push_back({Severity::kError, "E_CYCLE_ONLY_DEADLOCK",
                     "steps " + ids + " can only unlock each other and never start", "step:" + comp.front() + ".requires",
                     std::nullopt});
    }
    for (const auto& id : r.unreachable) {
      if (in_cycle.count(id)) continue;
      out.push_back({Severity::kWarning, "W_UNREACHABLE_STEP", "step '" + id + "' can never be unlocked",
                     "step:" + id + ".requires", std::nullopt});
    }
  }

  const auto used = referenced_parts(s);
  for (const auto& p : s.parts) {
    if (!used.count(p.id)) {
      out.push_back({Severity::kWarning, "W_UNUSED_PART", "part '" + p.id + "' is not referenced by any step or event",
                     "part:" + p.id, std::nullopt});
    }
  }
  for (const auto& st : s.steps) {
    if (st.hint.empty()) {
      out.push_back({Severity::kWarning, "W_NO_HINT", "step '" + st.id + "' has no hint text", "step:" + st.id,
                     std::nullopt});
    }
  }
  return out;
}

}  // namespace interact::lang
