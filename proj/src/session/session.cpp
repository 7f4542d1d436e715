#include "interact/session/session.hpp"

#include "interact/bytes.hpp"
#include "interact/error.hpp"
#include "interact/scene/condition.hpp"
#include "interact/scene/validate.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace interact::session {

using physics::World;
using physics::WorldConfig;

const char* status_name(StepStatus s) {
  switch (s) {
    case StepStatus::kLocked: return "locked";
    case StepStatus::kActive: return "active";
    case StepStatus::kCompleted: return "completed";
    case StepStatus::kSkipped: return "skipped";
  }
  return "locked";
}

std::uint64_t ticks_for(double seconds, double dt) {
  if (seconds <= 0.0) return 0;
  // 1e-9 absorbs round-off such as 1.0 / (1/120) = 119.99999999999999.
  return static_cast<std::uint64_t>(std::ceil(seconds / dt - 1e-9));
}

namespace {

Pose anchor_world(const Scenario& s, const World& w, const CableEnd& end) {
  const PartDef* part = s.find_part(end.part);
  const Anchor* a = part ? part->find_anchor(end.anchor) : nullptr;
  if (!a) throw EngineError("E_UNKNOWN_ANCHOR", "no anchor '" + end.part + "." + end.anchor + "'");
  return w.find(end.part)->pose * a->local.pose();
}

std::shared_ptr<const Scenario> checked(std::shared_ptr<const Scenario> s) {
  if (!s) throw EngineError("E_INVALID_SCENARIO", "no scenario");
  for (const auto& d : validate_scenario(*s)) {
    if (d.severity == Severity::kError) {
      throw EngineError("E_INVALID_SCENARIO", d.code + " at " + d.location + ": " + d.message);
    }
  }
  return s;
}

DifficultyLevel pick_difficulty(const Scenario& s, const std::string& id) {
  const auto levels = s.difficulties_or_default();
  std::string valid;
  for (const auto& d : levels) {
    if (d.id == id) return d;
    valid += (valid.empty() ? "" : ", ") + d.id;
  }
  throw EngineError("E_UNKNOWN_DIFFICULTY", "unknown difficulty '" + id + "'; valid: " + valid);
}

// Body pair key as stored in contacts (body_a < body_b).
bool touching(const std::vector<physics::Contact>& contacts, const std::string& a, const std::string& b) {
  const auto& lo = std::min(a, b);
  const auto& hi = std::max(a, b);
  return std::any_of(contacts.begin(), contacts.end(),
                     [&](const physics::Contact& c) { return c.body_a == lo && c.body_b == hi; });
}

}  // namespace

World build_world(const Scenario& s, const WorldConfig& base) {
  WorldConfig cfg = base;
  cfg.default_friction = kDefaultFriction;
  for (const auto& m : s.materials) cfg.friction[std::minmax(m.a, m.b)] = m.mu;

  World w(cfg);
  for (const auto& p : s.parts) {
    physics::RigidBody b;
    b.id = p.id;
    b.shape = p.shape;
    b.material = p.material;
    b.pose = p.initial_pose.pose();
    b.mass = p.mass;
    b.grabbable = p.grabbable;
    w.add_body(std::move(b));
  }
  for (const auto& r : s.regions) w.add_region({r.id, r.center, r.radius, r.parent});
  for (const auto& c : s.cables) {
    const Pose a = anchor_world(s, w, c.from);
    const Pose b = anchor_world(s, w, c.to);
    physics::WorldCable wc{cable::init_cable(c.id, c.length, c.nodes, a.position, b.position), {}};
    wc.cable.node_mass = c.node_mass;
    wc.cable.compliance = c.compliance;
    wc.cable.damping = c.damping;
    wc.ends[0] = physics::CableAttachment{c.from.part, s.find_part(c.from.part)->find_anchor(c.from.anchor)->local.position};
    wc.ends[1] = physics::CableAttachment{c.to.part, s.find_part(c.to.part)->find_anchor(c.to.anchor)->local.position};
    w.add_cable(std::move(wc));
  }
  return w;
}

Session::Session(std::shared_ptr<const Scenario> scenario, const std::string& difficulty)
    : scenario_(checked(std::move(scenario))),
      difficulty_(pick_difficulty(*scenario_, difficulty)),
      world_(build_world(*scenario_)),
      steps_(scenario_->steps.size()),
      declared_flags_(declared_flags(*scenario_)),
      input_digest_(kFnvOffset) {
  settle({}, pending_fired_);
}

std::size_t Session::index_of(const std::string& step) const {
  if (const auto i = scenario_->step_index(step)) return *i;
  throw EngineError("E_UNKNOWN_STEP", "no step '" + step + "'");
}

const StepState& Session::step_state(const std::string& id) const { return steps_[index_of(id)]; }

std::optional<std::string> Session::grabbed_part() const {
  if (world_.grabs().empty()) return std::nullopt;
  return world_.grabs().begin()->first;
}

bool Session::finished() const {
  return std::all_of(steps_.begin(), steps_.end(), [](const StepState& s) { return is_terminal(s.status); });
}

void Session::note(std::string kind, std::string subject, std::string detail) {
  log_.push_back({world_.tick(), std::move(kind), std::move(subject), std::move(detail)});
}

Pose Session::placing_target(const PlacingStep& p) const {
  const Anchor* a = scenario_->find_part(p.target_part)->find_anchor(p.target_anchor);
  return world_.find(p.target_part)->pose * a->local.pose();
}

void Session::release_grab() {
  if (const auto part = grabbed_part()) {
    world_.detach_grab(*part);
    note("release", *part);
  }
}

void Session::digest_input(const UserInput& in) {
  ByteWriter w;
  w.u64(world_.tick());
  w.u8(static_cast<std::uint8_t>(in.index()));
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, HandPose>) {
          w.pose(v.pose);
        } else if constexpr (std::is_same_v<T, Grab>) {
          w.str(v.part);
        } else if constexpr (std::is_same_v<T, Press>) {
          w.str(v.action_id);
        } else if constexpr (std::is_same_v<T, HintRequest> || std::is_same_v<T, SkipRequest>) {
          w.str(v.step);
        } else if constexpr (std::is_same_v<T, SetFlag>) {
          w.str(v.name);
        }
      },
      in);
  input_digest_ = fnv1a64(w.take(), input_digest_);
}

void Session::apply_input(const UserInput& in, std::set<std::string>& pressed) {
  if (const auto* hp = std::get_if<HandPose>(&in)) {
    Pose p = hp->pose;
    const double n = p.orientation.norm();
    if (!is_finite(p.position) || !is_finite(p.orientation) || n < 1e-12) {
      note("rejected", "hand_pose", "non-finite or zero-length pose");
      return;
    }
    p.orientation.coeffs() /= n;
    hand_ = p;
  } else if (const auto* g = std::get_if<Grab>(&in)) {
    const PartDef* def = scenario_->find_part(g->part);
    if (!def) return note("rejected", g->part, "unknown part");
    if (!def->grabbable) return note("rejected", g->part, "part is not grabbable");
    if (!world_.find(g->part)->active) return note("rejected", g->part, "part is inactive");
    if (grabbed_part() == g->part) return;
    release_grab();
    world_.attach_grab(g->part, hand_.value_or(Pose::identity()));
    note("grab", g->part);
  } else if (std::holds_alternative<Release>(in)) {
    release_grab();
  } else if (const auto* pr = std::get_if<Press>(&in)) {
    const bool known = std::any_of(scenario_->steps.begin(), scenario_->steps.end(), [&](const StepDef& s) {
      const auto* a = std::get_if<ActionStep>(&s.kind);
      return a && a->action_id == pr->action_id;
    });
    if (!known) return note("rejected", pr->action_id, "unknown action");
    pressed.insert(pr->action_id);
  } else if (const auto* h = std::get_if<HintRequest>(&in)) {
    try {
      request_hint(h->step);
    } catch (const EngineError& e) {
      note("rejected", h->step, e.what());
    }
  } else if (const auto* sk = std::get_if<SkipRequest>(&in)) {
    try {
      skip_step(sk->step);
    } catch (const EngineError& e) {
      note("rejected", sk->step, e.what());
    }
  } else if (const auto* f = std::get_if<SetFlag>(&in)) {
    if (!declared_flags_.count(f->name)) return note("rejected", f->name, "unknown flag");
    if (flags_.insert(f->name).second) note("flag", f->name, "input");
  }
}

FrameReport Session::tick(const std::vector<UserInput>& inputs) {
  std::set<std::string> pressed;
  for (const auto& in : inputs) {
    digest_input(in);
    apply_input(in, pressed);
  }

  const physics::TickReport report = world_.step(hand_);
  for (const auto& id : report.auto_unwelded) note("auto_unweld", id);

  const std::uint64_t now = world_.tick();
  const double dt = this->dt();
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    StepState& st = steps_[i];
    if (st.status != StepStatus::kActive) continue;
    const StepDef& def = scenario_->steps[i];
    const bool min_time_met = now - st.activated_tick >= ticks_for(def.min_time, dt);

    if (const auto* p = std::get_if<PlacingStep>(&def.kind)) {
      const PoseError err = pose_error(world_.find(p->part)->pose, placing_target(*p));
      if (err.d_pos <= p->pos_tol && err.d_rot <= p->rot_tol) {
        if (!st.in_tolerance_since) st.in_tolerance_since = now;
        ++st.in_tolerance_ticks;
        if (st.in_tolerance_ticks >= std::max<std::uint64_t>(1, ticks_for(p->dwell, dt)) && min_time_met) {
          st.residual = err;
          complete(i);
        }
      } else {
        st.in_tolerance_since.reset();
        st.in_tolerance_ticks = 0;
      }
    } else if (const auto* t = std::get_if<ToolUseStep>(&def.kind)) {
      if (touching(report.contacts, t->tool, t->target)) ++st.contact_ticks;
      if (st.contact_ticks >= ticks_for(t->contact_time, dt) && min_time_met) complete(i);
    } else if (const auto* a = std::get_if<ActionStep>(&def.kind)) {
      if (pressed.count(a->action_id) && min_time_met) complete(i);
    }
  }

  settle(report.entries, pending_fired_);

  FrameReport frame;
  frame.tick = now;
  frame.newly_completed = std::move(pending_done_);
  frame.fired_events = std::move(pending_fired_);
  pending_done_.clear();
  pending_fired_.clear();
  frame.helpers = helpers();
  frame.score_partial = score_partial();
  return frame;
}

void Session::weld_to_target(const PlacingStep& p) {
  if (grabbed_part() == p.part) release_grab();
  const Anchor* a = scenario_->find_part(p.target_part)->find_anchor(p.target_anchor);
  try {
    world_.set_weld(p.part, p.target_part, a->local.pose());
    note("weld", p.part, p.target_part + "." + p.target_anchor);
  } catch (const EngineError& e) {
    note("action_failed", p.part, e.what());
  }
}

void Session::complete(std::size_t i) {
  StepState& st = steps_[i];
  const StepDef& def = scenario_->steps[i];
  st.status = StepStatus::kCompleted;
  st.completed_tick = world_.tick();
  note("completed", def.id);
  if (const auto* p = std::get_if<PlacingStep>(&def.kind)) weld_to_target(*p);
  pending_done_.push_back(def.id);
}

std::string Session::request_hint(const std::string& step) {
  const std::size_t i = index_of(step);
  if (steps_[i].status != StepStatus::kActive) {
    throw EngineError("E_STEP_NOT_ACTIVE", "step '" + step + "' is " + status_name(steps_[i].status));
  }
  ++steps_[i].hints;
  note("hint", step, std::to_string(steps_[i].hints));
  return scenario_->steps[i].hint;
}

void Session::skip_step(const std::string& step) {
  const std::size_t i = index_of(step);
  StepState& st = steps_[i];
  if (st.status != StepStatus::kActive) {
    throw EngineError("E_STEP_NOT_ACTIVE", "step '" + step + "' is " + status_name(st.status));
  }
  st.status = StepStatus::kSkipped;
  st.completed_tick = world_.tick();
  note("skipped", step);
  // The weld snaps the part onto the target, so downstream steps see it placed.
  if (const auto* p = std::get_if<PlacingStep>(&scenario_->steps[i].kind)) weld_to_target(*p);
  pending_done_.push_back(step);
  settle({}, pending_fired_);
}

bool Session::is_done(std::string_view step) const {
  const auto i = scenario_->step_index(step);
  return i && is_terminal(steps_[*i].status);
}

bool Session::unlock() {
  bool changed = false;
  const auto done = [&](std::string_view id) { return is_done(id); };
  const auto flag = [&](std::string_view f) { return flags_.count(std::string(f)) > 0; };
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    StepState& st = steps_[i];
    if (st.status != StepStatus::kLocked) continue;
    if (!evaluate_condition(scenario_->steps[i].requirement, done, flag)) continue;
    st.status = StepStatus::kActive;
    st.activated_tick = world_.tick();
    note("activated", scenario_->steps[i].id);
    changed = true;
  }
  return changed;
}

bool Session::trigger_holds(const Trigger& t, const std::vector<physics::RegionEntry>& entries) const {
  switch (t.kind) {
    case Trigger::Kind::kStarted: {
      const auto i = scenario_->step_index(t.subject);
      return i && steps_[*i].status != StepStatus::kLocked;
    }
    case Trigger::Kind::kCompleted:
      return is_done(t.subject);
    case Trigger::Kind::kEntered:
      return std::any_of(entries.begin(), entries.end(), [&](const physics::RegionEntry& e) {
        return e.part == t.subject && e.region == t.region;
      });
    case Trigger::Kind::kFlagSet:
      return flags_.count(t.subject) > 0;
    case Trigger::Kind::kTimeElapsed:
      return world_.tick() >= ticks_for(t.seconds, dt());
  }
  return false;
}

void Session::settle(const std::vector<physics::RegionEntry>& entries, std::vector<std::string>& fired) {
  static constexpr std::array kOrder{Trigger::Kind::kStarted, Trigger::Kind::kCompleted, Trigger::Kind::kEntered,
                                     Trigger::Kind::kFlagSet, Trigger::Kind::kTimeElapsed};
  bool changed = true;
  while (changed) {
    changed = unlock();
    for (const auto kind : kOrder) {
      for (const auto& ev : scenario_->events) {
        if (ev.trigger.kind != kind || fired_.count(ev.id) || !trigger_holds(ev.trigger, entries)) continue;
        fire(ev);
        fired.push_back(ev.id);
        changed = true;
      }
    }
  }
}

void Session::fire(const EventDef& ev) {
  fired_.insert(ev.id);
  note("event", ev.id);
  for (const auto& act : ev.actions) {
    try {
      switch (act.kind) {
        case EventAction::Kind::kWeld: {
          if (grabbed_part() == act.target) release_grab();
          const Anchor* a = scenario_->find_part(act.parent)->find_anchor(act.anchor);
          world_.set_weld(act.target, act.parent, a->local.pose());
          note("weld", act.target, act.parent + "." + act.anchor);
          break;
        }
        case EventAction::Kind::kUnweld:
          world_.remove_weld(act.target);
          note("unweld", act.target);
          break;
        case EventAction::Kind::kActivate:
        case EventAction::Kind::kDeactivate: {
          const bool on = act.kind == EventAction::Kind::kActivate;
          if (world_.find(act.target)) {
            if (!on && grabbed_part() == act.target) release_grab();
            world_.set_active(act.target, on);
          } else {
            world_.set_region_active(act.target, on);
          }
          note(on ? "activate" : "deactivate", act.target);
          break;
        }
        case EventAction::Kind::kSetFlag:
          if (flags_.insert(act.target).second) note("flag", act.target, ev.id);
          break;
        case EventAction::Kind::kParticles:
          note("particles", act.target, ev.id);
          break;
      }
    } catch (const EngineError& e) {
      note("action_failed", act.target, e.what());
    }
  }
}

HelperFrame Session::helpers() const {
  HelperFrame out;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    const StepState& st = steps_[i];
    if (st.status != StepStatus::kActive) continue;
    const StepDef& def = scenario_->steps[i];
    const bool hinted = st.hints > 0;
    StepHelper h;
    h.step = def.id;
    if (const auto* p = std::get_if<PlacingStep>(&def.kind)) {
      const Pose target = placing_target(*p);
      if (difficulty_.ghost_enabled || hinted) h.ghost = target;
      if (difficulty_.trajectory_enabled || hinted) {
        const Pose from = world_.find(p->part)->pose;
        h.trajectory.reserve(kTrajectoryPoints);
        for (int k = 0; k < kTrajectoryPoints; ++k) {
          const double u = static_cast<double>(k) / (kTrajectoryPoints - 1);
          Quat q = from.orientation.slerp(u, target.orientation);
          q.normalize();
          h.trajectory.emplace_back((1.0 - u) * from.position + u * target.position, q);
        }
        h.trajectory.back() = target;
      }
    }
    if (difficulty_.instructions_enabled && !def.instruction.empty()) h.instruction = def.instruction;
    if (hinted) h.hint = def.hint;
    out.push_back(std::move(h));
  }
  return out;
}

ScoreReport Session::finalize(bool abandon) const {
  if (!abandon && !finished()) throw EngineError("E_SESSION_INCOMPLETE", "steps remain; pass abandon to score anyway");
  ScoreReport r;
  r.scenario = scenario_->name;
  r.difficulty = difficulty_.id;
  r.abandoned = abandon && !finished();
  const double dt = this->dt();
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    const StepState& st = steps_[i];
    const StepDef& def = scenario_->steps[i];
    StepScore sc;
    sc.id = def.id;
    sc.kind = def.kind_name();
    sc.par = def.par_time * difficulty_.par_time_scale;
    sc.hints = st.hints;
    sc.hint_penalty = difficulty_.hint_penalty * st.hints;
    if (st.status == StepStatus::kCompleted) {
      sc.status = "completed";
      sc.duration = static_cast<double>(st.completed_tick - st.activated_tick) * dt;
      sc.time_factor = time_factor(sc.duration, sc.par);
      if (const auto* p = std::get_if<PlacingStep>(&def.kind)) {
        sc.residual = st.residual;
        sc.accuracy_factor = accuracy_factor(st.residual, p->pos_tol, p->rot_tol);
      }
      sc.step_score = step_score(sc.time_factor, sc.accuracy_factor, difficulty_.hint_penalty, st.hints);
    } else if (st.status == StepStatus::kSkipped) {
      sc.status = "skipped";
      sc.skipped = true;
      sc.duration = static_cast<double>(st.completed_tick - st.activated_tick) * dt;
    } else {
      sc.status = "incomplete";
      sc.incomplete = true;
    }
    r.steps.push_back(std::move(sc));
  }
  r.total = session_total(r.steps);
  return r;
}

double Session::score_partial() const { return finalize(true).total; }

std::string Session::serialize_status() const {
  ByteWriter w;
  w.u64(world_.tick());
  w.str(difficulty_.id);
  for (const auto& st : steps_) {
    w.u8(static_cast<std::uint8_t>(st.status));
    w.u64(st.activated_tick);
    w.u8(st.in_tolerance_since ? 1 : 0);
    w.u64(st.in_tolerance_since.value_or(0));
    w.u64(st.in_tolerance_ticks);
    w.u64(st.contact_ticks);
    w.u64(st.completed_tick);
    w.f64(st.residual.d_pos);
    w.f64(st.residual.d_rot);
    w.u32(static_cast<std::uint32_t>(st.hints));
  }
  w.u32(static_cast<std::uint32_t>(flags_.size()));
  for (const auto& f : flags_) w.str(f);
  w.u32(static_cast<std::uint32_t>(fired_.size()));
  for (const auto& e : fired_) w.str(e);
  w.u8(hand_ ? 1 : 0);
  w.pose(hand_.value_or(Pose::identity()));
  w.u64(input_digest_);
  return w.take();
}

}  // namespace interact::session
