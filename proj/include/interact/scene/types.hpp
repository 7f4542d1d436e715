#pragma once

#include "interact/math.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace interact {

/// Authored placement: meters plus roll/pitch/yaw in degrees. The authored
/// angles are kept so a formatted scenario reparses to the identical value.
struct Placement {
  Vec3 position = Vec3::Zero();
  Vec3 rpy_deg = Vec3::Zero();

  Pose pose() const {
    return {position, quat_from_rpy(deg_to_rad(rpy_deg.x()), deg_to_rad(rpy_deg.y()), deg_to_rad(rpy_deg.z()))};
  }
  bool operator==(const Placement& o) const { return position == o.position && rpy_deg == o.rpy_deg; }
};

struct Sphere {
  double radius = 0.0;
  bool operator==(const Sphere&) const = default;
};

struct Box {
  Vec3 half_extents = Vec3::Zero();
  bool operator==(const Box& o) const { return half_extents == o.half_extents; }
};

/// Capsule axis is the local z axis; the core segment spans ±half_height.
struct Capsule {
  double radius = 0.0;
  double half_height = 0.0;
  bool operator==(const Capsule&) const = default;
};

struct ConvexHull {
  std::vector<Vec3> vertices;
  bool operator==(const ConvexHull& o) const { return vertices == o.vertices; }
};

using ColliderShape = std::variant<Sphere, Box, Capsule, ConvexHull>;

struct Anchor {
  std::string name;
  Placement local;
  bool operator==(const Anchor&) const = default;
};

struct PartDef {
  std::string id;
  ColliderShape shape = Sphere{0.1};
  double mass = 0.0;  // 0 = kinematic / static
  Placement initial_pose;
  bool grabbable = false;
  std::vector<Anchor> anchors;
  std::string material = "default";

  const Anchor* find_anchor(std::string_view name) const;
  bool operator==(const PartDef&) const = default;
};

/// Boolean unlock rule over completed steps and flags. And/Or are n-ary and
/// kept flat (no And directly under And, no Or directly under Or).
struct Cond {
  enum class Kind { kStart, kDone, kFlag, kNot, kAnd, kOr };

  Kind kind = Kind::kStart;
  std::string name;  // step id for kDone, flag name for kFlag
  std::vector<Cond> children;

  static Cond start() { return {}; }
  static Cond done(std::string step) { return {Kind::kDone, std::move(step), {}}; }
  static Cond flag(std::string name) { return {Kind::kFlag, std::move(name), {}}; }
  static Cond negate(Cond c) { return {Kind::kNot, {}, {std::move(c)}}; }
  static Cond all_of(std::vector<Cond> cs) { return combine(Kind::kAnd, std::move(cs)); }
  static Cond any_of(std::vector<Cond> cs) { return combine(Kind::kOr, std::move(cs)); }

  /// Builds an n-ary node, splicing children of the same kind.
  static Cond combine(Kind kind, std::vector<Cond> cs);

  bool operator==(const Cond&) const = default;
};

struct PlacingStep {
  std::string part;
  std::string target_part;
  std::string target_anchor;
  double pos_tol = 0.0;  // m
  double rot_tol = 0.0;  // rad
  double dwell = 0.5;    // s
  bool operator==(const PlacingStep&) const = default;
};

struct ActionStep {
  std::string action_id;
  bool operator==(const ActionStep&) const = default;
};

struct ToolUseStep {
  std::string tool;
  std::string target;
  double contact_time = 0.0;  // s
  bool operator==(const ToolUseStep&) const = default;
};

using StepKind = std::variant<PlacingStep, ActionStep, ToolUseStep>;

struct StepDef {
  std::string id;
  StepKind kind = ActionStep{};
  Cond requirement = Cond::start();
  double min_time = 0.0;
  double par_time = 0.0;
  std::string instruction;
  std::string hint;

  bool is_placing() const { return std::holds_alternative<PlacingStep>(kind); }
  const char* kind_name() const;
  bool operator==(const StepDef&) const = default;
};

struct Trigger {
  enum class Kind { kStarted, kCompleted, kEntered, kFlagSet, kTimeElapsed };

  Kind kind = Kind::kTimeElapsed;
  std::string subject;  // step id, part id (kEntered), or flag name
  std::string region;   // kEntered only
  double seconds = 0.0;  // kTimeElapsed only

  bool operator==(const Trigger&) const = default;
};

struct EventAction {
  enum class Kind { kWeld, kUnweld, kActivate, kDeactivate, kSetFlag, kParticles };

  Kind kind = Kind::kSetFlag;
  std::string target;  // part, entity, flag name or region
  std::string parent;  // kWeld only
  std::string anchor;  // kWeld only

  bool operator==(const EventAction&) const = default;
};

struct EventDef {
  std::string id;
  Trigger trigger;
  std::vector<EventAction> actions;
  bool operator==(const EventDef&) const = default;
};

struct Region {
  std::string id;
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  std::optional<std::string> parent;
  bool operator==(const Region& o) const {
    return id == o.id && center == o.center && radius == o.radius && parent == o.parent;
  }
};

struct DifficultyLevel {
  std::string id;
  bool ghost_enabled = true;
  bool trajectory_enabled = true;
  bool instructions_enabled = true;
  double hint_penalty = 10.0;
  double par_time_scale = 1.0;
  bool operator==(const DifficultyLevel&) const = default;
};

struct MaterialPair {
  std::string a;
  std::string b;
  double mu = 0.5;
  bool operator==(const MaterialPair&) const = default;
};

struct CableEnd {
  std::string part;
  std::string anchor;
  bool operator==(const CableEnd&) const = default;
};

struct CableDef {
  std::string id;
  CableEnd from;
  CableEnd to;
  double length = 0.0;
  int nodes = 0;
  double node_mass = 0.05;
  double compliance = 0.0;
  double damping = 0.0;
  bool operator==(const CableDef&) const = default;
};

struct Scenario {
  std::string name;
  std::string environment = "laboratory";
  std::vector<PartDef> parts;
  std::vector<Region> regions;
  std::vector<MaterialPair> materials;
  std::vector<CableDef> cables;
  std::vector<StepDef> steps;
  std::vector<EventDef> events;
  std::vector<DifficultyLevel> difficulties;

  const PartDef* find_part(std::string_view id) const;
  const StepDef* find_step(std::string_view id) const;
  const Region* find_region(std::string_view id) const;
  const DifficultyLevel* find_difficulty(std::string_view id) const;
  std::optional<std::size_t> step_index(std::string_view id) const;

  /// Declared difficulties, or the single injected default when none exist.
  std::vector<DifficultyLevel> difficulties_or_default() const;

  /// Friction coefficient for a material pair; 0.5 when no entry exists.
  double friction(std::string_view mat_a, std::string_view mat_b) const;

  bool operator==(const Scenario&) const = default;
};

inline constexpr const char* kDefaultDifficultyId = "default";
inline constexpr double kDefaultFriction = 0.5;

DifficultyLevel default_difficulty();

}  // namespace interact
