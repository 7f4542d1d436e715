#include "random_scenes.hpp"

#include "interact/scene/validate.hpp"

namespace testing_support {

using namespace interact;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Vec3 random_vec(Rng& rng, double extent) {
  return {uniform(rng, -extent, extent), uniform(rng, -extent, extent), uniform(rng, -extent, extent)};
}

Quat random_rotation(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Quat q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q;
}

Pose random_pose(Rng& rng, double extent) { return {random_vec(rng, extent), random_rotation(rng)}; }

ConvexHull random_hull(Rng& rng, int min_vertices, int max_vertices) {
  ConvexHull h;
  for (;;) {
    h.vertices.clear();
    const int n = std::uniform_int_distribution<int>(min_vertices, max_vertices)(rng);
    const Vec3 scale(uniform(rng, 0.2, 1.0), uniform(rng, 0.2, 1.0), uniform(rng, 0.2, 1.0));
    for (int i = 0; i < n; ++i) h.vertices.push_back(random_vec(rng, 1.0).cwiseProduct(scale));
    if (hull_is_full_rank(h)) return h;
  }
}

ColliderShape random_shape(Rng& rng, bool allow_sphere) {
  const int kind = std::uniform_int_distribution<int>(allow_sphere ? 0 : 1, 3)(rng);
  switch (kind) {
    case 0: return Sphere{uniform(rng, 0.2, 1.0)};
    case 1: return Box{Vec3(uniform(rng, 0.1, 0.8), uniform(rng, 0.1, 0.8), uniform(rng, 0.1, 0.8))};
    case 2: return Capsule{uniform(rng, 0.1, 0.5), uniform(rng, 0.0, 0.6)};
    default: return random_hull(rng);
  }
}

namespace {

Cond random_atom(Rng& rng, int distinct) {
  const int k = std::uniform_int_distribution<int>(0, distinct - 1)(rng);
  const int r = std::uniform_int_distribution<int>(0, 9)(rng);
  if (r == 0) return Cond::start();
  if (r < 6) return Cond::done("s" + std::to_string(k));
  return Cond::flag("f" + std::to_string(k));
}

Cond build(Rng& rng, int distinct, int atoms) {
  if (atoms <= 1) {
    Cond a = random_atom(rng, distinct);
    return std::uniform_int_distribution<int>(0, 3)(rng) == 0 ? Cond::negate(a) : a;
  }
  const int r = std::uniform_int_distribution<int>(0, 4)(rng);
  if (r == 0) return Cond::negate(build(rng, distinct, atoms));
  const int left = std::uniform_int_distribution<int>(1, atoms - 1)(rng);
  std::vector<Cond> kids{build(rng, distinct, left), build(rng, distinct, atoms - left)};
  return r <= 2 ? Cond::all_of(std::move(kids)) : Cond::any_of(std::move(kids));
}

}  // namespace

Cond random_condition(Rng& rng, int distinct_atoms, int max_atoms) {
  return build(rng, distinct_atoms, std::uniform_int_distribution<int>(1, max_atoms)(rng));
}

std::vector<replay::TraceRecord> random_trace(Rng& rng, const Scenario& s, std::uint64_t ticks,
                                              double inputs_per_tick) {
  using namespace interact::session;
  std::vector<std::string> parts, steps, actions, flags;
  for (const auto& p : s.parts) parts.push_back(p.id);
  for (const auto& st : s.steps) {
    steps.push_back(st.id);
    if (const auto* a = std::get_if<ActionStep>(&st.kind)) actions.push_back(a->action_id);
  }
  for (const auto& f : declared_flags(s)) flags.push_back(f);
  parts.push_back("no_such_part");
  steps.push_back("no_such_step");
  actions.push_back("no_such_action");
  flags.push_back("no_such_flag");

  const auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  std::poisson_distribution<int> count(inputs_per_tick);
  std::vector<replay::TraceRecord> out;
  for (std::uint64_t t = 0; t < ticks; ++t) {
    for (int k = count(rng); k > 0; --k) {
      const int kind = std::uniform_int_distribution<int>(0, 99)(rng);
      UserInput in;
      if (kind < 55) {
        const auto& anchor = s.parts[std::uniform_int_distribution<std::size_t>(0, s.parts.size() - 1)(rng)];
        in = HandPose{Pose(anchor.initial_pose.position + random_vec(rng, 0.3), random_rotation(rng))};
      } else if (kind < 70) {
        in = Grab{pick(parts)};
      } else if (kind < 80) {
        in = Release{};
      } else if (kind < 88) {
        in = Press{pick(actions)};
      } else if (kind < 93) {
        in = HintRequest{pick(steps)};
      } else if (kind < 97) {
        in = SkipRequest{pick(steps)};
      } else {
        in = SetFlag{pick(flags)};
      }
      out.push_back({t, std::move(in)});
    }
  }
  return out;
}

}  // namespace testing_support
