#include "interact/physics/world.hpp"

#include "interact/bytes.hpp"
#include "interact/error.hpp"
#include "interact/physics/broadphase.hpp"
#include "interact/physics/collide.hpp"
#include "interact/physics/shape.hpp"

#include <algorithm>
#include <functional>

namespace interact::physics {

World::World(WorldConfig cfg) : cfg_(std::move(cfg)) {}

RigidBody& World::add_body(RigidBody body) {
  if (find(body.id)) throw EngineError("E_DUPLICATE_ID", "body '" + body.id + "' already exists");
  if (body.mass > 0.0) body.inertia = mass_properties(body.shape, body.mass).inertia;
  const auto it = std::lower_bound(bodies_.begin(), bodies_.end(), body.id,
                                   [](const RigidBody& b, const std::string& id) { return b.id < id; });
  return *bodies_.insert(it, std::move(body));
}

RigidBody* World::find(std::string_view id) {
  const auto it =
      std::lower_bound(bodies_.begin(), bodies_.end(), id, [](const RigidBody& b, std::string_view k) { return b.id < k; });
  return it != bodies_.end() && it->id == id ? &*it : nullptr;
}

const RigidBody* World::find(std::string_view id) const { return const_cast<World*>(this)->find(id); }

RigidBody& World::body(std::string_view id) {
  RigidBody* b = find(id);
  if (!b) throw EngineError("E_UNKNOWN_BODY", "no body '" + std::string(id) + "'");
  return *b;
}

bool World::creates_cycle(const std::string& child, const std::string& parent) const {
  std::string cur = parent;
  for (std::size_t guard = 0; guard <= welds_.size(); ++guard) {
    if (cur == child) return true;
    const auto it = welds_.find(cur);
    if (it == welds_.end()) return false;
    cur = it->second.parent;
  }
  return true;
}

void World::set_weld(const std::string& child, const std::string& parent, const Pose& relative) {
  RigidBody& c = body(child);
  body(parent);
  if (child == parent) throw EngineError("E_WELD_SELF", "cannot weld '" + child + "' to itself");
  if (c.grabbed) throw EngineError("E_WELD_GRABBED", "cannot weld grabbed part '" + child + "'");
  if (creates_cycle(child, parent)) {
    throw EngineError("E_WELD_CYCLE", "welding '" + child + "' to '" + parent + "' would close a cycle");
  }
  welds_[child] = {child, parent, relative};
  c.welded = true;
  c.linear_velocity.setZero();
  c.angular_velocity.setZero();
  enforce_welds();
}

void World::remove_weld(const std::string& child) {
  const auto it = welds_.find(child);
  if (it == welds_.end()) return;
  RigidBody& c = body(child);
  const RigidBody& p = body(it->second.parent);
  c.linear_velocity = p.point_velocity(c.pose.position);
  c.angular_velocity = p.angular_velocity;
  c.welded = false;
  welds_.erase(it);
}

const WeldJoint* World::weld_of(std::string_view child) const {
  const auto it = welds_.find(child);
  return it == welds_.end() ? nullptr : &it->second;
}

bool World::attach_grab(const std::string& part, const Pose& hand) {
  RigidBody& b = body(part);
  if (!b.grabbable) throw EngineError("E_NOT_GRABBABLE", "part '" + part + "' is not grabbable");
  bool unwelded = false;
  if (b.welded) {
    remove_weld(part);
    pending_unwelds_.push_back(part);
    unwelded = true;
  }
  grabs_[part] = {part, hand.inverse() * b.pose};
  b.grabbed = true;
  b.linear_velocity.setZero();
  b.angular_velocity.setZero();
  last_hand_ = hand;
  has_hand_ = true;
  return unwelded;
}

void World::detach_grab(const std::string& part) {
  if (grabs_.erase(part) == 0) return;
  body(part).grabbed = false;
}

void World::set_active(const std::string& part, bool active) { body(part).active = active; }

Vec3 World::region_center(const WorldRegion& r) const {
  if (!r.parent) return r.center;
  const RigidBody* p = find(*r.parent);
  return p ? p->pose.transform_point(r.center) : r.center;
}

std::set<std::string> World::inside_region(const WorldRegion& r) const {
  std::set<std::string> inside;
  const Vec3 c = region_center(r);
  if (!r.active) return inside;
  for (const auto& b : bodies_) {
    if (!b.active || (r.parent && b.id == *r.parent)) continue;
    if ((b.pose.position - c).norm() <= r.radius) inside.insert(b.id);
  }
  return inside;
}

void World::add_region(WorldRegion region) {
  region_members_.push_back(inside_region(region));
  regions_.push_back(std::move(region));
}

void World::set_region_active(std::string_view id, bool active) {
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    if (regions_[i].id != id) continue;
    regions_[i].active = active;
    // Parts already inside on reactivation do not count as entering.
    region_members_[i] = inside_region(regions_[i]);
    return;
  }
  throw EngineError("E_UNKNOWN_REGION", "no region '" + std::string(id) + "'");
}

void World::add_cable(WorldCable c) {
  const auto it = std::lower_bound(cables_.begin(), cables_.end(), c.cable.id,
                                   [](const WorldCable& w, const std::string& id) { return w.cable.id < id; });
  cables_.insert(it, std::move(c));
}

double World::friction(const std::string& a, const std::string& b) const {
  const auto key = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
  const auto it = cfg_.friction.find(key);
  return it == cfg_.friction.end() ? cfg_.default_friction : it->second;
}

void World::drive_grabs(const std::optional<Pose>& hand) {
  if (hand) {
    last_hand_ = *hand;
    has_hand_ = true;
  }
  if (!has_hand_) return;
  for (const auto& [id, g] : grabs_) {
    RigidBody& b = body(id);
    const Pose next = last_hand_ * g.offset;
    b.linear_velocity = (next.position - b.pose.position) / cfg_.dt;
    Quat dq = next.orientation * b.pose.orientation.conjugate();
    if (dq.w() < 0.0) dq.coeffs() = -dq.coeffs();
    const Eigen::AngleAxisd aa(dq);
    b.angular_velocity = aa.axis() * (aa.angle() / cfg_.dt);
    if (aa.angle() == 0.0) b.angular_velocity.setZero();
    b.pose = next;
  }
}

void World::enforce_welds() {
  std::set<std::string> done;
  std::function<void(const std::string&)> resolve = [&](const std::string& child) {
    if (done.count(child)) return;
    done.insert(child);
    const auto it = welds_.find(child);
    if (it == welds_.end()) return;
    resolve(it->second.parent);
    const RigidBody& p = body(it->second.parent);
    RigidBody& c = body(child);
    c.pose = p.pose * it->second.relative;
    c.linear_velocity = p.point_velocity(c.pose.position);
    c.angular_velocity = p.angular_velocity;
  };
  for (const auto& [child, w] : welds_) resolve(child);
}

void World::step_cables() {
  cable::CableParams params;
  params.iterations = cfg_.cable_iterations;
  params.dt = cfg_.dt;
  params.gravity = cfg_.gravity;
  for (auto& wc : cables_) {
    for (int e = 0; e < 2; ++e) {
      if (!wc.ends[e]) continue;
      const RigidBody& b = body(wc.ends[e]->part);
      wc.cable.pins[e] = b.pose.transform_point(wc.ends[e]->local);
    }
    cable::step_cable(wc.cable, params);
  }
}

std::vector<RegionEntry> World::update_regions() {
  std::vector<RegionEntry> entries;
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    std::set<std::string> now = inside_region(regions_[i]);
    for (const auto& id : now) {
      if (!region_members_[i].count(id)) entries.push_back({id, regions_[i].id});
    }
    region_members_[i] = std::move(now);
  }
  return entries;
}

void World::check_finite() const {
  for (const auto& b : bodies_) {
    if (!is_finite(b.pose.position) || !is_finite(b.pose.orientation) || !is_finite(b.linear_velocity) ||
        !is_finite(b.angular_velocity)) {
      throw EngineError("E_SIM_DIVERGED", "simulation diverged at body '" + b.id + "'");
    }
  }
  for (const auto& wc : cables_) {
    for (const auto& p : wc.cable.positions) {
      if (!is_finite(p)) throw EngineError("E_SIM_DIVERGED", "simulation diverged at cable '" + wc.cable.id + "'");
    }
  }
}

TickReport World::step(const std::optional<Pose>& hand_pose) {
  TickReport report;
  report.auto_unwelded = std::move(pending_unwelds_);
  pending_unwelds_.clear();

  drive_grabs(hand_pose);

  const double dt = cfg_.dt;
  for (auto& b : bodies_) {
    if (b.dynamic()) b.linear_velocity += cfg_.gravity * dt;
  }

  std::vector<Contact> solvable;
  for (const auto& [i, j] : broadphase_pairs(bodies_)) {
    const RigidBody& a = bodies_[i];
    const RigidBody& b = bodies_[j];
    const bool moving = a.dynamic() || b.dynamic() || a.grabbed || b.grabbed;
    if (!moving) continue;
    const double mu = friction(a.material, b.material);
    for (const auto& cp : collide_manifold(a.shape, a.pose, b.shape, b.pose)) {
      Contact c{a.id, b.id, i, j, cp.point, cp.normal, cp.depth, mu, cp.degenerate};
      if (!a.grabbed && !b.grabbed && (a.dynamic() || b.dynamic())) solvable.push_back(c);
      report.contacts.push_back(std::move(c));
    }
  }
  solve_contacts(bodies_, solvable, {cfg_.solver_iterations, cfg_.baumgarte, cfg_.slop, dt});

  for (auto& b : bodies_) {
    if (!b.dynamic()) continue;
    b.pose.position += b.linear_velocity * dt;
    b.pose.orientation = integrate_rotation(b.pose.orientation, b.angular_velocity, dt);
  }
  enforce_welds();
  step_cables();
  report.entries = update_regions();
  check_finite();
  ++tick_;
  return report;
}


std::string World::serialize() const {
  ByteWriter w;
  w.u64(tick_);
  w.u32(static_cast<std::uint32_t>(bodies_.size()));
  for (const auto& b : bodies_) {
    w.str(b.id);
    w.pose(b.pose);
    w.vec(b.linear_velocity);
    w.vec(b.angular_velocity);
    w.u8(static_cast<std::uint8_t>((b.active ? 1 : 0) | (b.grabbed ? 2 : 0) | (b.welded ? 4 : 0)));
  }
  w.u32(static_cast<std::uint32_t>(welds_.size()));
  for (const auto& [child, weld] : welds_) {
    w.str(child);
    w.str(weld.parent);
    w.pose(weld.relative);
  }
  w.u32(static_cast<std::uint32_t>(grabs_.size()));
  for (const auto& [part, g] : grabs_) {
    w.str(part);
    w.pose(g.offset);
  }
  w.u8(has_hand_ ? 1 : 0);
  w.pose(last_hand_);
  w.u32(static_cast<std::uint32_t>(regions_.size()));
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    w.str(regions_[i].id);
    w.u8(regions_[i].active ? 1 : 0);
    w.u32(static_cast<std::uint32_t>(region_members_[i].size()));
    for (const auto& id : region_members_[i]) w.str(id);
  }
  w.u32(static_cast<std::uint32_t>(cables_.size()));
  for (const auto& wc : cables_) {
    w.str(wc.cable.id);
    w.u32(static_cast<std::uint32_t>(wc.cable.positions.size()));
    for (const auto& p : wc.cable.positions) w.vec(p);
    for (const auto& v : wc.cable.velocities) w.vec(v);
  }
  return w.take();
}

}  // namespace interact::physics
