#include "interact/lang/format.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace interact::lang {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_angle(double deg) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", deg);
  double back = 0.0;
  std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
  if (back == deg) return buf;
  return format_number(deg);
}

std::string quote(const std::string& text) {
  std::string out = "\"";
  for (const char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

namespace {

int precedence(const Cond& c) {
  switch (c.kind) {
    case Cond::Kind::kOr: return 1;
    case Cond::Kind::kAnd: return 2;
    default: return 3;
  }
}

void write_condition(std::ostringstream& os, const Cond& c, int min_prec) {
  const bool parens = precedence(c) < min_prec;
  if (parens) os << '(';
  switch (c.kind) {
    case Cond::Kind::kStart: os << "start"; break;
    case Cond::Kind::kDone: os << "done(" << c.name << ')'; break;
    case Cond::Kind::kFlag: os << "flag(" << c.name << ')'; break;
    case Cond::Kind::kNot:
      os << '!';
      write_condition(os, c.children.front(), 3);
      break;
    case Cond::Kind::kAnd:
    case Cond::Kind::kOr: {
      const char* op = c.kind == Cond::Kind::kAnd ? " && " : " || ";
      // Same-kind children are spliced on parse, so a nested same-kind child
      // must keep its parentheses to survive a round trip.
      const int child_min = precedence(c) + 1;
      for (std::size_t i = 0; i < c.children.size(); ++i) {
        if (i) os << op;
        write_condition(os, c.children[i], child_min);
      }
      break;
    }
  }
  if (parens) os << ')';
}

std::string vec3(const Vec3& v) {
  return "(" + format_number(v.x()) + ", " + format_number(v.y()) + ", " + format_number(v.z()) + ")";
}

std::string pose(const Placement& p) {
  return vec3(p.position) + " rpy(" + format_angle(p.rpy_deg.x()) + ", " + format_angle(p.rpy_deg.y()) + ", " +
         format_angle(p.rpy_deg.z()) + ")";
}

std::string shape(const ColliderShape& s) {
  return std::visit(
      [](const auto& sh) -> std::string {
        using T = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return "sphere(" + format_number(sh.radius) + ")";
        } else if constexpr (std::is_same_v<T, Box>) {
          return "box(" + format_number(sh.half_extents.x()) + ", " + format_number(sh.half_extents.y()) + ", " +
                 format_number(sh.half_extents.z()) + ")";
        } else if constexpr (std::is_same_v<T, Capsule>) {
          return "capsule(" + format_number(sh.radius) + ", " + format_number(sh.half_height) + ")";
        } else {
          std::string out = "hull(";
          for (std::size_t i = 0; i < sh.vertices.size(); ++i) {
            if (i) out += ", ";
            out += vec3(sh.vertices[i]);
          }
          return out + ")";
        }
      },
      s);
}

std::string trigger(const Trigger& t) {
  switch (t.kind) {
    case Trigger::Kind::kStarted: return "started(" + t.subject + ")";
    case Trigger::Kind::kCompleted: return "completed(" + t.subject + ")";
    case Trigger::Kind::kEntered: return "entered(" + t.subject + ", " + t.region + ")";
    case Trigger::Kind::kFlagSet: return "flag(" + t.subject + ")";
    case Trigger::Kind::kTimeElapsed: return "time(" + format_number(t.seconds) + ")";
  }
  return {};
}

std::string action(const EventAction& a) {
  switch (a.kind) {
    case EventAction::Kind::kWeld: return "weld(" + a.target + ", " + a.parent + "." + a.anchor + ")";
    case EventAction::Kind::kUnweld: return "unweld(" + a.target + ")";
    case EventAction::Kind::kActivate: return "activate(" + a.target + ")";
    case EventAction::Kind::kDeactivate: return "deactivate(" + a.target + ")";
    case EventAction::Kind::kSetFlag: return "set_flag(" + a.target + ")";
    case EventAction::Kind::kParticles: return "particles(" + a.target + ")";
  }
  return {};
}

const char* boolean(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string format_condition(const Cond& c) {
  std::ostringstream os;
  write_condition(os, c, 0);
  return os.str();
}

std::string format_canonical(const Scenario& s) {
  std::ostringstream os;
  os << "scenario " << quote(s.name) << " {\n";
  os << "  environment = " << s.environment << ";\n";

  for (const auto& p : s.parts) {
    os << "\n  part " << p.id << " {\n";
    os << "    shape = " << shape(p.shape) << ";\n";
    os << "    mass = " << format_number(p.mass) << ";\n";
    os << "    pose = " << pose(p.initial_pose) << ";\n";
    os << "    grabbable = " << boolean(p.grabbable) << ";\n";
    for (const auto& a : p.anchors) os << "    anchor " << a.name << " = " << pose(a.local) << ";\n";
    os << "    material = " << p.material << ";\n";
    os << "  }\n";
  }

  if (!s.regions.empty()) os << '\n';
  for (const auto& r : s.regions) {
    os << "  region " << r.id << " = sphere(" << vec3(r.center) << ", " << format_number(r.radius) << ")";
    if (r.parent) os << " on " << *r.parent;
    os << ";\n";
  }

  if (!s.materials.empty()) os << '\n';
  for (const auto& m : s.materials) os << "  material " << m.a << ' ' << m.b << " = " << format_number(m.mu) << ";\n";

  for (const auto& c : s.cables) {
    os << "\n  cable " << c.id << " {\n";
    os << "    from = " << c.from.part << '.' << c.from.anchor << ";\n";
    os << "    to = " << c.to.part << '.' << c.to.anchor << ";\n";
    os << "    length = " << format_number(c.length) << ";\n";
    os << "    nodes = " << c.nodes << ";\n";
    os << "    node_mass = " << format_number(c.node_mass) << ";\n";
    os << "    compliance = " << format_number(c.compliance) << ";\n";
    os << "    damping = " << format_number(c.damping) << ";\n";
    os << "  }\n";
  }

  for (const auto& st : s.steps) {
    os << "\n  step " << st.id << " : " << st.kind_name() << " {\n";
    if (const auto* pl = std::get_if<PlacingStep>(&st.kind)) {
      os << "    part = " << pl->part << ";\n";
      os << "    target = anchor(" << pl->target_part << ", " << pl->target_anchor << ");\n";
      os << "    tol = pos " << format_number(pl->pos_tol) << " rot " << format_angle(rad_to_deg(pl->rot_tol)) << "deg;\n";
      os << "    dwell = " << format_number(pl->dwell) << ";\n";
    } else if (const auto* ac = std::get_if<ActionStep>(&st.kind)) {
      os << "    action_id = " << ac->action_id << ";\n";
    } else if (const auto* tu = std::get_if<ToolUseStep>(&st.kind)) {
      os << "    tool = " << tu->tool << ";\n";
      os << "    part = " << tu->target << ";\n";
      os << "    contact_time = " << format_number(tu->contact_time) << ";\n";
    }
    os << "    requires = " << format_condition(st.requirement) << ";\n";
    os << "    min_time = " << format_number(st.min_time) << ";\n";
    os << "    par_time = " << format_number(st.par_time) << ";\n";
    if (!st.instruction.empty()) os << "    instruction = " << quote(st.instruction) << ";\n";
    if (!st.hint.empty()) os << "    hint = " << quote(st.hint) << ";\n";
    os << "  }\n";
  }

  for (const auto& ev : s.events) {
    os << "\n  event " << ev.id << " {\n";
    os << "    when = " << trigger(ev.trigger) << ";\n";
    if (!ev.actions.empty()) {
      os << "    do = ";
      for (std::size_t i = 0; i < ev.actions.size(); ++i) {
        if (i) os << ", ";
        os << action(ev.actions[i]);
      }
      os << ";\n";
    }
    os << "  }\n";
  }

  for (const auto& d : s.difficulties) {
    os << "\n  difficulty " << d.id << " {\n";
    os << "    ghost = " << boolean(d.ghost_enabled) << ";\n";
    os << "    trajectory = " << boolean(d.trajectory_enabled) << ";\n";
    os << "    instructions = " << boolean(d.instructions_enabled) << ";\n";
    os << "    hint_penalty = " << format_number(d.hint_penalty) << ";\n";
    os << "    par_time_scale = " << format_number(d.par_time_scale) << ";\n";
    os << "  }\n";
  }

  os << "}\n";
  return os.str();
}

}  // namespace interact::lang
