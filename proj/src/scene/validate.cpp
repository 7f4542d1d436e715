#include "interact/scene/validate.hpp"

#include "interact/scene/condition.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <map>
#include <sstream>

namespace interact {

namespace {

class Checker {
 public:
  explicit Checker(const Scenario& s) : s_(s), flags_(declared_flags(s)) {}

  std::vector<Diagnostic> run() {
    check_unique("part", s_.parts);
    check_unique("region", s_.regions);
    check_unique("step", s_.steps);
    check_unique("event", s_.events);
    check_unique("difficulty", s_.difficulties);
    check_unique("cable", s_.cables);
    for (const auto& p : s_.parts) check_part(p);
    for (const auto& r : s_.regions) check_region(r);
    for (const auto& m : s_.materials) check_material(m);
    for (const auto& c : s_.cables) check_cable(c);
    for (const auto& st : s_.steps) check_step(st);
    for (const auto& ev : s_.events) check_event(ev);
    for (const auto& d : s_.difficulties) check_difficulty(d);
    return std::move(out_);
  }

 private:
  void error(std::string code, std::string location, std::string message) {
    out_.push_back({Severity::kError, std::move(code), std::move(message), std::move(location), std::nullopt});
  }

  template <typename T>
  void check_unique(const char* kind, const std::vector<T>& items) {
    std::map<std::string, int> seen;
    for (const auto& x : items) {
      if (++seen[x.id] == 2) {
        error("E_DUPLICATE_ID", std::string(kind) + ":" + x.id, std::string(kind) + " id '" + x.id + "' declared more than once");
      }
    }
  }

  static bool finite(const Placement& p) { return p.position.allFinite() && p.rpy_deg.allFinite(); }

  static bool positive(double v) { return std::isfinite(v) && v > 0.0; }
  static bool non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

  void check_part(const PartDef& p) {
    const std::string loc = "part:" + p.id;
    std::visit(
        [&](const auto& shape) {
          using T = std::decay_t<decltype(shape)>;
          if constexpr (std::is_same_v<T, Sphere>) {
            if (!positive(shape.radius)) error("E_BAD_SHAPE", loc + ".shape", "sphere radius must be > 0");
          } else if constexpr (std::is_same_v<T, Box>) {
            if (!positive(shape.half_extents.x()) || !positive(shape.half_extents.y()) || !positive(shape.half_extents.z())) {
              error("E_BAD_SHAPE", loc + ".shape", "box half extents must all be > 0");
            }
          } else if constexpr (std::is_same_v<T, Capsule>) {
            if (!positive(shape.radius) || !non_negative(shape.half_height)) {
              error("E_BAD_SHAPE", loc + ".shape", "capsule needs radius > 0 and half height >= 0");
            }
          } else {
            bool all_finite = true;
            for (const auto& v : shape.vertices) all_finite = all_finite && v.allFinite();
            if (!all_finite) {
              error("E_BAD_SHAPE", loc + ".shape", "hull vertices must be finite");
            } else if (!hull_is_full_rank(shape)) {
              error("E_DEGENERATE_HULL", loc + ".shape", "hull needs at least 4 vertices spanning three dimensions");
            }
          }
        },
        p.shape);
    if (!non_negative(p.mass)) error("E_BAD_MASS", loc + ".mass", "mass must be finite and >= 0");
    if (!finite(p.initial_pose)) error("E_BAD_POSE", loc + ".pose", "pose components must be finite");
    std::map<std::string, int> names;
    for (const auto& a : p.anchors) {
      const std::string aloc = loc + ".anchor:" + a.name;
      if (++names[a.name] == 2) error("E_DUPLICATE_ANCHOR", aloc, "anchor '" + a.name + "' declared twice on part '" + p.id + "'");
      if (!finite(a.local)) error("E_BAD_POSE", aloc, "anchor pose components must be finite");
    }
  }

  void check_region(const Region& r) {
    const std::string loc = "region:" + r.id;
    if (!positive(r.radius)) error("E_BAD_REGION", loc, "region radius must be > 0");
    if (!r.center.allFinite()) error("E_BAD_REGION", loc, "region center must be finite");
    if (r.parent && !s_.find_part(*r.parent)) error("E_DANGLING_PART", loc, "region parent part '" + *r.parent + "' does not exist");
  }

  void check_material(const MaterialPair& m) {
    if (!non_negative(m.mu)) error("E_BAD_FRICTION", "material:" + m.a + ":" + m.b, "friction coefficient must be >= 0");
  }

  bool check_part_ref(const std::string& id, const std::string& loc) {
    if (s_.find_part(id)) return true;
    error("E_DANGLING_PART", loc, "part '" + id + "' does not exist");
    return false;
  }

  bool check_anchor_ref(const std::string& part, const std::string& anchor, const std::string& loc) {
    if (!check_part_ref(part, loc)) return false;
    if (s_.find_part(part)->find_anchor(anchor)) return true;
    error("E_DANGLING_ANCHOR", loc, "part '" + part + "' has no anchor '" + anchor + "'");
    return false;
  }

  void check_cable(const CableDef& c) {
    const std::string loc = "cable:" + c.id;
    if (!positive(c.length)) error("E_BAD_CABLE", loc, "cable length must be > 0");
    if (c.nodes < 2) error("E_BAD_CABLE", loc, "cable needs at least 2 nodes");
    if (!positive(c.node_mass)) error("E_BAD_CABLE", loc, "cable node mass must be > 0");
    if (!non_negative(c.compliance) || !non_negative(c.damping)) {
      error("E_BAD_CABLE", loc, "cable compliance and damping must be >= 0");
    }
    const bool a_ok = check_anchor_ref(c.from.part, c.from.anchor, loc + ".from");
    const bool b_ok = check_anchor_ref(c.to.part, c.to.anchor, loc + ".to");
    if (a_ok && b_ok && positive(c.length)) {
      const auto end_point = [&](const CableEnd& e) {
        const PartDef* p = s_.find_part(e.part);
        return (p->initial_pose.pose() * p->find_anchor(e.anchor)->local.pose()).position;
      };
      if ((end_point(c.from) - end_point(c.to)).norm() > c.length) {
        error("E_CABLE_TOO_SHORT", loc, "cable endpoints are farther apart than the cable length");
      }
    }
  }

  void check_condition(const Cond& e, const std::string& loc) {
    for_each_atom(e, [&](const Cond& atom) {
      if (atom.kind == Cond::Kind::kDone && !s_.find_step(atom.name)) {
        error("E_DANGLING_STEP", loc, "step '" + atom.name + "' does not exist");
      } else if (atom.kind == Cond::Kind::kFlag && !flags_.count(atom.name)) {
        error("E_DANGLING_FLAG", loc, "flag '" + atom.name + "' is never set by any event");
      }
    });
  }

  void check_step(const StepDef& st) {
    const std::string loc = "step:" + st.id;
    if (const auto* pl = std::get_if<PlacingStep>(&st.kind)) {
      check_part_ref(pl->part, loc + ".part");
      check_anchor_ref(pl->target_part, pl->target_anchor, loc + ".target");
      if (pl->part == pl->target_part) error("E_SELF_TARGET", loc + ".target", "placing step targets its own part");
      if (!positive(pl->pos_tol) || !positive(pl->rot_tol)) {
        error("E_BAD_TOLERANCE", loc + ".tol", "position and rotation tolerances must be > 0");
      }
      if (!non_negative(pl->dwell)) error("E_BAD_TIME", loc + ".dwell", "dwell must be >= 0");
    } else if (const auto* ac = std::get_if<ActionStep>(&st.kind)) {
      if (ac->action_id.empty()) error("E_MISSING_FIELD", loc + ".action_id", "action step needs an action_id");
    } else if (const auto* tu = std::get_if<ToolUseStep>(&st.kind)) {
      check_part_ref(tu->tool, loc + ".tool");
      check_part_ref(tu->target, loc + ".part");
      if (tu->tool == tu->target) error("E_SELF_TARGET", loc + ".tool", "tool-use step uses a part on itself");
      if (!positive(tu->contact_time)) error("E_BAD_TIME", loc + ".contact_time", "contact_time must be > 0");
    }
    check_condition(st.requirement, loc + ".requires");
    if (!non_negative(st.min_time)) error("E_BAD_TIME", loc + ".min_time", "min_time must be >= 0");
    if (!positive(st.par_time)) {
      error("E_BAD_TIME", loc + ".par_time", "par_time must be > 0");
    } else if (st.par_time < st.min_time) {
      error("E_BAD_TIME", loc + ".par_time", "par_time must be >= min_time");
    }
  }

  void check_event(const EventDef& ev) {
    const std::string loc = "event:" + ev.id;
    const Trigger& t = ev.trigger;
    switch (t.kind) {
      case Trigger::Kind::kStarted:
      case Trigger::Kind::kCompleted:
        if (!s_.find_step(t.subject)) error("E_DANGLING_STEP", loc + ".when", "step '" + t.subject + "' does not exist");
        break;
      case Trigger::Kind::kEntered:
        check_part_ref(t.subject, loc + ".when");
        if (!s_.find_region(t.region)) error("E_DANGLING_REGION", loc + ".when", "region '" + t.region + "' does not exist");
        break;
      case Trigger::Kind::kFlagSet:
        if (!flags_.count(t.subject)) error("E_DANGLING_FLAG", loc + ".when", "flag '" + t.subject + "' is never set by any event");
        break;
      case Trigger::Kind::kTimeElapsed:
        if (!non_negative(t.seconds)) error("E_BAD_TIME", loc + ".when", "time trigger must be >= 0");
        break;
    }
    for (const auto& a : ev.actions) {
      const std::string aloc = loc + ".do";
      switch (a.kind) {
        case EventAction::Kind::kWeld:
          check_part_ref(a.target, aloc);
          check_anchor_ref(a.parent, a.anchor, aloc);
          if (a.target == a.parent) error("E_SELF_TARGET", aloc, "cannot weld part '" + a.target + "' to itself");
          break;
        case EventAction::Kind::kUnweld:
          check_part_ref(a.target, aloc);
          break;
        case EventAction::Kind::kActivate:
        case EventAction::Kind::kDeactivate:
          if (!s_.find_part(a.target) && !s_.find_region(a.target)) {
            error("E_DANGLING_ENTITY", aloc, "no part or region named '" + a.target + "'");
          }
          break;
        case EventAction::Kind::kSetFlag:
          if (a.target.empty()) error("E_MISSING_FIELD", aloc, "set_flag needs a flag name");
          break;
        case EventAction::Kind::kParticles:
          if (!s_.find_region(a.target)) error("E_DANGLING_REGION", aloc, "region '" + a.target + "' does not exist");
          break;
      }
    }
  }

  void check_difficulty(const DifficultyLevel& d) {
    const std::string loc = "difficulty:" + d.id;
    if (!non_negative(d.hint_penalty)) error("E_BAD_DIFFICULTY", loc, "hint_penalty must be >= 0");
    if (!positive(d.par_time_scale)) error("E_BAD_DIFFICULTY", loc, "par_time_scale must be > 0");
  }

  const Scenario& s_;
  std::set<std::string> flags_;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::set<std::string> declared_flags(const Scenario& s) {
  std::set<std::string> out;
  for (const auto& ev : s.events) {
    for (const auto& a : ev.actions) {
      if (a.kind == EventAction::Kind::kSetFlag) out.insert(a.target);
    }
  }
  return out;
}

bool hull_is_full_rank(const ConvexHull& hull) {
  const auto n = hull.vertices.size();
  if (n < 4) return false;
  Eigen::MatrixX3d m(static_cast<Eigen::Index>(n), 3);
  Vec3 mean = Vec3::Zero();
  for (const auto& v : hull.vertices) mean += v;
  mean /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) m.row(static_cast<Eigen::Index>(i)) = (hull.vertices[i] - mean).transpose();
  const Eigen::JacobiSVD<Eigen::MatrixX3d> svd(m);
  const auto& sv = svd.singularValues();
  if (sv(0) <= 0.0) return false;
  return sv(2) / sv(0) > 1e-9;
}

std::vector<Diagnostic> validate_scenario(const Scenario& s) { return Checker(s).run(); }

Reachability reachability_check(const Scenario& s) {
  std::set<std::string> reachable;
  std::set<std::string> flags;
  const auto trigger_possible = [&](const Trigger& t) {
    switch (t.kind) {
      case Trigger::Kind::kStarted:
      case Trigger::Kind::kCompleted:
        return reachable.count(t.subject) > 0;
      case Trigger::Kind::kFlagSet:
        return flags.count(t.subject) > 0;
      case Trigger::Kind::kEntered:
      case Trigger::Kind::kTimeElapsed:
        return true;
    }
    return false;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    // Flags first so FlagSet chains settle within the same round.
    bool flags_changed = true;
    while (flags_changed) {
      flags_changed = false;
      for (const auto& ev : s.events) {
        if (!trigger_possible(ev.trigger)) continue;
        for (const auto& a : ev.actions) {
          if (a.kind == EventAction::Kind::kSetFlag && flags.insert(a.target).second) flags_changed = true;
        }
      }
    }
    std::vector<std::string> newly;
    for (const auto& st : s.steps) {
      if (!reachable.count(st.id) && evaluate_condition(st.requirement, reachable, flags)) newly.push_back(st.id);
    }
    for (auto& id : newly) {
      reachable.insert(std::move(id));
      changed = true;
    }
  }

  Reachability r;
  for (const auto& st : s.steps) (reachable.count(st.id) ? r.reachable : r.unreachable).push_back(st.id);
  return r;
}

}  // namespace interact
