#include "interact/lang/parser.hpp"
#include "interact/scene/condition.hpp"
#include "interact/scene/validate.hpp"
#include "random_scenes.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <string>

using namespace interact;

namespace {

const char* kMinimal = R"(scenario "t" {
  part p { shape = sphere(0.1); mass = 0; pose = (0,0,0) rpy(0,0,0); }
  step s : action { action_id = go; requires = start; par_time = 5; instruction = "go"; }
})";

Scenario minimal() {
  auto r = lang::parse(kMinimal);
  REQUIRE(r.scenario);
  return *r.scenario;
}

std::vector<std::string> codes(const std::vector<Diagnostic>& ds) {
  std::vector<std::string> out;
  for (const auto& d : ds) out.push_back(d.code);
  return out;
}

bool has_code(const std::vector<Diagnostic>& ds, const std::string& code) {
  const auto c = codes(ds);
  return std::find(c.begin(), c.end(), code) != c.end();
}

StepDef action(const std::string& id, Cond req) {
  StepDef s;
  s.id = id;
  s.kind = ActionStep{"a_" + id};
  s.requirement = std::move(req);
  s.par_time = 5;
  return s;
}

// Exhaustive exploration of completion orders. A step is reachable when it
// becomes active in some reachable state; Started events fire on activation
// and Completed events on completion, both setting flags.
std::set<std::string> oracle_reachable(const Scenario& s) {
  struct State {
    std::set<std::string> done, flags, seen_active;
    bool operator<(const State& o) const {
      return std::tie(done, flags, seen_active) < std::tie(o.done, o.flags, o.seen_active);
    }
  };
  const auto close = [&](State st) {
    // Fire time(0) events, then activate until stable.
    for (const auto& ev : s.events) {
      if (ev.trigger.kind == Trigger::Kind::kTimeElapsed)
        for (const auto& a : ev.actions) st.flags.insert(a.target);
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& step : s.steps) {
        if (st.done.count(step.id) || st.seen_active.count(step.id)) continue;
        if (!evaluate_condition(step.requirement, st.done, st.flags)) continue;
        st.seen_active.insert(step.id);
        changed = true;
        for (const auto& ev : s.events) {
          if (ev.trigger.kind == Trigger::Kind::kStarted && ev.trigger.subject == step.id)
            for (const auto& a : ev.actions) st.flags.insert(a.target);
        }
      }
      for (const auto& ev : s.events) {
        if (ev.trigger.kind == Trigger::Kind::kFlagSet && st.flags.count(ev.trigger.subject)) {
          for (const auto& a : ev.actions) changed |= st.flags.insert(a.target).second;
        }
      }
    }
    return st;
  };
  std::set<State> visited;
  std::queue<State> todo;
  todo.push(close(State{}));
  std::set<std::string> reachable;
  while (!todo.empty()) {
    State st = todo.front();
    todo.pop();
    if (!visited.insert(st).second) continue;
    for (const auto& id : st.seen_active) reachable.insert(id);
    for (const auto& id : st.seen_active) {
      if (st.done.count(id)) continue;
      State next = st;
      next.done.insert(id);
      for (const auto& ev : s.events) {
        if (ev.trigger.kind == Trigger::Kind::kCompleted && ev.trigger.subject == id)
          for (const auto& a : ev.actions) next.flags.insert(a.target);
      }
      todo.push(close(next));
    }
  }
  return reachable;
}

// Condition without negation so the optimistic fixpoint is exact.
Cond random_monotone(testing_support::Rng& rng, int steps, int flags, int depth) {
  const int r = std::uniform_int_distribution<int>(0, 9)(rng);
  if (depth > 2 || r < 5) {
    if (r == 0) return Cond::start();
    if (r < 3 && flags > 0) return Cond::flag("f" + std::to_string(std::uniform_int_distribution<int>(0, flags - 1)(rng)));
    return Cond::done("s" + std::to_string(std::uniform_int_distribution<int>(0, steps - 1)(rng)));
  }
  std::vector<Cond> kids{random_monotone(rng, steps, flags, depth + 1), random_monotone(rng, steps, flags, depth + 1)};
  return r < 8 ? Cond::all_of(std::move(kids)) : Cond::any_of(std::move(kids));
}

}  // namespace

TEST_SUITE("validate") {
  TEST_CASE("minimal scenario is clean") { CHECK(validate_scenario(minimal()).empty()); }

  TEST_CASE("undeclared target anchor") {
    Scenario s = minimal();
    PartDef q;
    q.id = "q";
    q.mass = 1;
    q.grabbable = true;
    s.parts.push_back(q);
    StepDef st;
    st.id = "place";
    st.kind = PlacingStep{"q", "p", "nowhere", 0.01, 0.1, 0.5};
    st.par_time = 5;
    s.steps.push_back(st);
    const auto ds = validate_scenario(s);
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].code == "E_DANGLING_ANCHOR");
    CHECK(ds[0].severity == Severity::kError);
  }

  TEST_CASE("coplanar hull is degenerate") {
    Scenario s = minimal();
    s.parts[0].shape = ConvexHull{{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0)}};
    CHECK(codes(validate_scenario(s)) == std::vector<std::string>{"E_DEGENERATE_HULL"});
  }

  TEST_CASE("hull rank agrees with singular values") {
    testing_support::Rng rng(3);
    for (int i = 0; i < 500; ++i) {
      std::vector<Vec3> v;
      const int n = std::uniform_int_distribution<int>(4, 10)(rng);
      const int flat_axes = std::uniform_int_distribution<int>(0, 2)(rng);
      for (int k = 0; k < n; ++k) {
        Vec3 p = testing_support::random_vec(rng, 1.0);
        if (flat_axes >= 1) p.z() = 0.3;
        if (flat_axes >= 2) p.y() = 2.0 * p.x();
        v.push_back(p);
      }
      Eigen::MatrixXd m(n, 3);
      Vec3 mean = Vec3::Zero();
      for (const auto& p : v) mean += p;
      mean /= n;
      for (int k = 0; k < n; ++k) m.row(k) = (v[k] - mean).transpose();
      const Eigen::Vector3d sv = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
      const bool full = sv(2) > 1e-9 * sv(0);
      CHECK(hull_is_full_rank(ConvexHull{v}) == full);
      CHECK(full == (flat_axes == 0));
    }
  }

  TEST_CASE("invariant violations carry their codes") {
    SUBCASE("duplicate part id") {
      Scenario s = minimal();
      s.parts.push_back(s.parts[0]);
      CHECK(has_code(validate_scenario(s), "E_DUPLICATE_ID"));
    }
    SUBCASE("non-positive sphere radius") {
      Scenario s = minimal();
      s.parts[0].shape = Sphere{0.0};
      CHECK(has_code(validate_scenario(s), "E_BAD_SHAPE"));
    }
    SUBCASE("negative mass") {
      Scenario s = minimal();
      s.parts[0].mass = -1;
      CHECK(has_code(validate_scenario(s), "E_BAD_MASS"));
    }
    SUBCASE("placing part equals target part") {
      Scenario s = minimal();
      s.parts[0].anchors.push_back({"a", {}});
      StepDef st;
      st.id = "self";
      st.kind = PlacingStep{"p", "p", "a", 0.01, 0.1, 0.5};
      st.par_time = 5;
      s.steps.push_back(st);
      CHECK(has_code(validate_scenario(s), "E_SELF_TARGET"));
    }
    SUBCASE("par below min time") {
      Scenario s = minimal();
      s.steps[0].min_time = 10;
      CHECK(has_code(validate_scenario(s), "E_BAD_TIME"));
    }
    SUBCASE("dangling step in requires") {
      Scenario s = minimal();
      s.steps[0].requirement = Cond::done("nosuch");
      CHECK(has_code(validate_scenario(s), "E_DANGLING_STEP"));
    }
    SUBCASE("dangling region parent") {
      Scenario s = minimal();
      s.regions.push_back({"r", Vec3::Zero(), 0.1, std::string("ghost")});
      CHECK(has_code(validate_scenario(s), "E_DANGLING_PART"));
    }
    SUBCASE("zero region radius") {
      Scenario s = minimal();
      s.regions.push_back({"r", Vec3::Zero(), 0.0, std::nullopt});
      CHECK(has_code(validate_scenario(s), "E_BAD_REGION"));
    }
    SUBCASE("negative friction") {
      Scenario s = minimal();
      s.materials.push_back({"a", "b", -0.1});
      CHECK(has_code(validate_scenario(s), "E_BAD_FRICTION"));
    }
    SUBCASE("non-positive par time scale") {
      Scenario s = minimal();
      DifficultyLevel d = default_difficulty();
      d.id = "bad";
      d.par_time_scale = 0;
      s.difficulties.push_back(d);
      CHECK(has_code(validate_scenario(s), "E_BAD_DIFFICULTY"));
    }
  }

  TEST_CASE("default difficulty injected when none declared") {
    const auto ds = minimal().difficulties_or_default();
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].id == kDefaultDifficultyId);
  }

  TEST_CASE("friction lookup is symmetric with a default") {
    Scenario s = minimal();
    s.materials.push_back({"steel", "rubber", 0.9});
    CHECK(s.friction("rubber", "steel") == 0.9);
    CHECK(s.friction("steel", "rubber") == 0.9);
    CHECK(s.friction("steel", "glass") == kDefaultFriction);
  }
}

TEST_SUITE("reachability") {
  TEST_CASE("linear chain") {
    Scenario s;
    s.steps = {action("a", Cond::start()), action("b", Cond::done("a")), action("c", Cond::done("b"))};
    const auto r = reachability_check(s);
    CHECK(r.reachable == std::vector<std::string>{"a", "b", "c"});
    CHECK(r.unreachable.empty());
  }

  TEST_CASE("mutual deadlock") {
    Scenario s;
    s.steps = {action("a", Cond::done("b")), action("b", Cond::done("a"))};
    const auto r = reachability_check(s);
    CHECK(r.reachable.empty());
    CHECK(r.unreachable == std::vector<std::string>{"a", "b"});
  }

  TEST_CASE("flag set only by own completion") {
    Scenario s;
    s.steps = {action("a", Cond::flag("f"))};
    s.events.push_back({"e", {Trigger::Kind::kCompleted, "a", {}, 0}, {{EventAction::Kind::kSetFlag, "f", {}, {}}}});
    CHECK(reachability_check(s).unreachable == std::vector<std::string>{"a"});
    CHECK(oracle_reachable(s).empty());
  }

  TEST_CASE("agrees with exhaustive completion orders") {
    testing_support::Rng rng(11);
    for (int trial = 0; trial < 400; ++trial) {
      Scenario s;
      const int n = std::uniform_int_distribution<int>(1, 6)(rng);
      const int nf = std::uniform_int_distribution<int>(0, 2)(rng);
      for (int i = 0; i < n; ++i) s.steps.push_back(action("s" + std::to_string(i), random_monotone(rng, n, nf, 0)));
      for (int f = 0; f < nf; ++f) {
        const int kind = std::uniform_int_distribution<int>(0, 3)(rng);
        Trigger t;
        if (kind == 0) {
          t = {Trigger::Kind::kCompleted, "s" + std::to_string(std::uniform_int_distribution<int>(0, n - 1)(rng)), {}, 0};
        } else if (kind == 1) {
          t = {Trigger::Kind::kStarted, "s" + std::to_string(std::uniform_int_distribution<int>(0, n - 1)(rng)), {}, 0};
        } else if (kind == 2) {
          t = {Trigger::Kind::kFlagSet, "f" + std::to_string((f + 1) % nf), {}, 0};
        } else {
          t = {Trigger::Kind::kTimeElapsed, {}, {}, 0.0};
        }
        s.events.push_back({"e" + std::to_string(f), t, {{EventAction::Kind::kSetFlag, "f" + std::to_string(f), {}, {}}}});
      }
      const auto r = reachability_check(s);
      const auto oracle = oracle_reachable(s);
      const std::set<std::string> got(r.reachable.begin(), r.reachable.end());
      REQUIRE(got == oracle);
      CHECK(r.reachable.size() + r.unreachable.size() == s.steps.size());
    }
  }

  TEST_CASE("adding a start step never shrinks the reachable set") {
    testing_support::Rng rng(12);
    for (int trial = 0; trial < 300; ++trial) {
      Scenario s;
      const int n = std::uniform_int_distribution<int>(1, 6)(rng);
      for (int i = 0; i < n; ++i) s.steps.push_back(action("s" + std::to_string(i), random_monotone(rng, n + 1, 0, 0)));
      const auto before = reachability_check(s).reachable;
      s.steps.push_back(action("s" + std::to_string(n), Cond::start()));
      const auto after = reachability_check(s).reachable;
      for (const auto& id : before) CHECK(std::find(after.begin(), after.end(), id) != after.end());
    }
  }
}
