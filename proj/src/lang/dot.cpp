#include "interact/lang/dot.hpp"

#include "interact/scene/condition.hpp"

#include <set>
#include <sstream>

namespace interact::lang {
namespace {

std::string q(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

std::string event_node(const EventDef& ev) { return q("event:" + ev.id); }

}  // namespace

std::string export_graph_dot(const Scenario& s) {
  std::ostringstream os;
  os << "digraph " << q(s.name) << " {\n";
  os << "  rankdir=LR;\n";
  for (const auto& st : s.steps) {
    // The newline escape is added after quoting so it stays a DOT line break.
    const std::string label = q(st.id);
    os << "  " << label << " [label=" << label.substr(0, label.size() - 1) << "\\n" << st.kind_name() << "\"];\n";
  }
  for (const auto& ev : s.events) {
    os << "  " << event_node(ev) << " [label=" << q(ev.id) << ", shape=box, style=dashed];\n";
  }
  for (const auto& st : s.steps) {
    for_each_atom(st.requirement, [&](const Cond& atom) {
      if (atom.kind == Cond::Kind::kDone) os << "  " << q(atom.name) << " -> " << q(st.id) << ";\n";
    });
  }
  for (const auto& ev : s.events) {
    const auto& t = ev.trigger;
    if (t.kind == Trigger::Kind::kStarted || t.kind == Trigger::Kind::kCompleted) {
      os << "  " << q(t.subject) << " -> " << event_node(ev) << " [style=dashed];\n";
    }
    if (t.kind == Trigger::Kind::kFlagSet) {
      for (const auto& other : s.events) {
        for (const auto& a : other.actions) {
          if (a.kind == EventAction::Kind::kSetFlag && a.target == t.subject) {
            os << "  " << event_node(other) << " -> " << event_node(ev) << " [style=dashed];\n";
          }
        }
      }
    }
    for (const auto& a : ev.actions) {
      if (a.kind != EventAction::Kind::kSetFlag) continue;
      for (const auto& st : s.steps) {
        bool reads = false;
        for_each_atom(st.requirement, [&](const Cond& atom) {
          reads = reads || (atom.kind == Cond::Kind::kFlag && atom.name == a.target);
        });
        if (reads) os << "  " << event_node(ev) << " -> " << q(st.id) << " [style=dashed];\n";
      }
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace interact::lang
