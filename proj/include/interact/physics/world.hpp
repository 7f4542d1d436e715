#pragma once

#include "interact/cable/cable.hpp"
#include "interact/physics/body.hpp"
#include "interact/physics/solver.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace interact::physics {

struct WorldConfig {
  Vec3 gravity{0.0, 0.0, -9.81};
  double dt = 1.0 / 120.0;
  int solver_iterations = 8;
  double baumgarte = 0.2;
  double slop = 1e-3;
  double default_friction = 0.5;
  std::map<std::pair<std::string, std::string>, double> friction;  // key ordered (a ≤ b)
  int cable_iterations = 20;
};

struct WeldJoint {
  std::string child;
  std::string parent;
  Pose relative;  // child pose in the parent frame
};

struct GrabConstraint {
  std::string part;
  Pose offset;  // part pose in the hand frame
};

/// Spherical trigger volume; `center` is in the parent body's frame when a
/// parent is set, else in world space.
struct WorldRegion {
  std::string id;
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  std::optional<std::string> parent;
  bool active = true;  // inactive regions have no members and report no entries
};

struct CableAttachment {
  std::string part;
  Vec3 local = Vec3::Zero();
};

struct WorldCable {
  cable::Cable cable;
  std::array<std::optional<CableAttachment>, 2> ends;
};

struct RegionEntry {
  std::string part;
  std::string region;
};

struct TickReport {
  std::vector<Contact> contacts;
  std::vector<RegionEntry> entries;
  std::vector<std::string> auto_unwelded;  // grabs that released a weld since the last tick
};

/// Fixed-step rigid-body world. Bodies are kept sorted by id, which fixes
/// the order of broadphase pairs, contacts and serialization.
///
/// One tick, in order: drive grabbed bodies from the hand pose; apply
/// gravity to dynamic velocities; broadphase and narrowphase on the current
/// poses; solve contacts; integrate dynamic poses; snap welded children;
/// step cables; detect region entries.
class World {
 public:
  explicit World(WorldConfig cfg = {});

  const WorldConfig& config() const { return cfg_; }
  WorldConfig& config() { return cfg_; }

  /// Inserts in id order. Inertia is taken from the shape when `body.mass > 0`.
  RigidBody& add_body(RigidBody body);
  RigidBody* find(std::string_view id);
  const RigidBody* find(std::string_view id) const;
  RigidBody& body(std::string_view id);  // throws E_UNKNOWN_BODY
  const std::vector<RigidBody>& bodies() const { return bodies_; }
  std::vector<RigidBody>& bodies() { return bodies_; }

  /// Replaces any existing weld of `child`. Throws E_WELD_CYCLE, E_WELD_GRABBED,
  /// E_WELD_SELF or E_UNKNOWN_BODY. The child snaps to the parent at once and
  /// its velocities are zeroed.
  void set_weld(const std::string& child, const std::string& parent, const Pose& relative);
  /// Releases the weld; the child keeps the parent's point velocity. No-op
  /// when the child is not welded.
  void remove_weld(const std::string& child);
  const WeldJoint* weld_of(std::string_view child) const;
  const std::map<std::string, WeldJoint, std::less<>>& welds() const { return welds_; }

  /// Throws E_NOT_GRABBABLE or E_UNKNOWN_BODY. A welded part is unwelded
  /// first; the release is reported by the next tick. Returns true in that case.
  bool attach_grab(const std::string& part, const Pose& hand);
  /// Releases the grab; the body keeps its finite-difference velocity.
  void detach_grab(const std::string& part);
  const std::map<std::string, GrabConstraint, std::less<>>& grabs() const { return grabs_; }

  void set_active(const std::string& part, bool active);

  void add_region(WorldRegion region);
  /// Throws E_UNKNOWN_REGION.
  void set_region_active(std::string_view id, bool active);
  const std::vector<WorldRegion>& regions() const { return regions_; }
  Vec3 region_center(const WorldRegion& r) const;

  /// Cables are kept in id order; attached ends are re-pinned every tick.
  void add_cable(WorldCable c);
  const std::vector<WorldCable>& cables() const { return cables_; }

  double friction(const std::string& material_a, const std::string& material_b) const;

  /// Throws E_SIM_DIVERGED naming the first body (or cable) with a
  /// non-finite state.
  TickReport step(const std::optional<Pose>& hand_pose);

  std::uint64_t tick() const { return tick_; }

  /// Canonical little-endian byte layout:
  ///   u64 tick
  ///   u32 body count, then per body in id order: id, pose (px py pz qw qx qy qz),
  ///     linear velocity (3), angular velocity (3), flags byte
  ///     (bit0 active, bit1 grabbed, bit2 welded)
  ///   u32 weld count, then per weld in child order: child, parent, relative pose
  ///   u32 grab count, then per grab in part order: part, offset pose
  ///   u8 hand-known flag, last hand pose
  ///   u32 region count, then per region in insertion order: id, u8 active, u32 n,
  ///     n part ids inside
  ///   u32 cable count, then per cable in id order: id, u32 n, n positions, n velocities
  /// Strings are u32 length + bytes, reals are IEEE-754 f64.
  std::string serialize() const;

 private:
  void drive_grabs(const std::optional<Pose>& hand);
  void enforce_welds();
  void step_cables();
  std::vector<RegionEntry> update_regions();
  std::set<std::string> inside_region(const WorldRegion& r) const;
  bool creates_cycle(const std::string& child, const std::string& parent) const;
  void check_finite() const;

  WorldConfig cfg_;
  std::vector<RigidBody> bodies_;
  std::map<std::string, WeldJoint, std::less<>> welds_;
  std::map<std::string, GrabConstraint, std::less<>> grabs_;
  std::vector<WorldRegion> regions_;
  std::vector<std::set<std::string>> region_members_;
  std::vector<WorldCable> cables_;
  std::vector<std::string> pending_unwelds_;
  Pose last_hand_;
  bool has_hand_ = false;
  std::uint64_t tick_ = 0;
};

inline TickReport world_step(World& w, const std::optional<Pose>& hand_pose) { return w.step(hand_pose); }

}  // namespace interact::physics
