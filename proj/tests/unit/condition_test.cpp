#include "interact/scene/condition.hpp"
#include "interact/scene/pose_error.hpp"
#include "interact/scene/validate.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace interact;

using testing_support::OracleExpr;

TEST_SUITE("condition") {
  TEST_CASE("conjunction over sibling steps") {
    const Cond c = Cond::all_of({Cond::done("a"), Cond::done("b")});
    CHECK(evaluate_condition(c, std::set<std::string>{"a", "b"}, {}));
    CHECK_FALSE(evaluate_condition(c, std::set<std::string>{"a"}, {}));
  }

  TEST_CASE("start is constant true") { CHECK(evaluate_condition(Cond::start(), std::set<std::string>{}, {})); }

  TEST_CASE("negated done or flag") {
    const Cond c = Cond::any_of({Cond::negate(Cond::done("a")), Cond::flag("f")});
    CHECK_FALSE(evaluate_condition(c, std::set<std::string>{"a"}, {}));
    CHECK(evaluate_condition(c, std::set<std::string>{"a"}, std::set<std::string>{"f"}));
    CHECK(evaluate_condition(c, std::set<std::string>{}, {}));
  }

  TEST_CASE("and/or nodes stay flat") {
    const Cond c = Cond::all_of({Cond::done("a"), Cond::all_of({Cond::done("b"), Cond::done("c")})});
    REQUIRE(c.kind == Cond::Kind::kAnd);
    CHECK(c.children.size() == 3);
    for (const auto& ch : c.children) CHECK(ch.kind == Cond::Kind::kDone);
    const Cond o = Cond::any_of({Cond::any_of({Cond::flag("x"), Cond::flag("y")}), Cond::flag("z")});
    CHECK(o.children.size() == 3);
  }

  TEST_CASE("atoms are visited left to right") {
    const Cond c = Cond::all_of({Cond::done("a"), Cond::negate(Cond::flag("f")), Cond::done("b")});
    std::vector<std::string> seen;
    for_each_atom(c, [&](const Cond& a) { seen.push_back(a.name); });
    CHECK(seen == std::vector<std::string>{"a", "f", "b"});
  }

  TEST_CASE("truth-table oracle over all assignments") {
    std::mt19937_64 rng(20261018);
    int checked = 0;
    for (int trial = 0; trial < 3000; ++trial) {
      const int k = std::uniform_int_distribution<int>(1, 3)(rng);
      int budget = 6;
      const OracleExpr e = testing_support::random_oracle(rng, k, budget);
      const Cond c = testing_support::to_cond(e, k);
      for (std::uint32_t mask = 0; mask < (1u << (2 * k)); ++mask) {
        std::set<std::string> done, flags;
        for (int i = 0; i < k; ++i) {
          if ((mask >> i) & 1u) done.insert("s" + std::to_string(i));
          if ((mask >> (k + i)) & 1u) flags.insert("f" + std::to_string(i));
        }
        REQUIRE(evaluate_condition(c, done, flags) == testing_support::oracle_eval(e, mask));
        ++checked;
      }
    }
    CHECK(checked > 10000);
  }
}

TEST_SUITE("pose") {
  TEST_CASE("identical poses") {
    const Pose p{Vec3(1, 2, 3), quat_from_rpy(0.1, 0.2, 0.3)};
    const PoseError e = pose_error(p, p);
    CHECK(e.d_pos == 0.0);
    CHECK(e.d_rot == 0.0);
  }

  TEST_CASE("3-4-5 offset") {
    const PoseError e = pose_error(Pose::from_position(Vec3(0.003, 0.004, 0)), Pose::identity());
    CHECK(e.d_pos == doctest::Approx(0.005).epsilon(1e-12));
  }

  TEST_CASE("quarter turn about z") {
    const PoseError e = pose_error(Pose::identity(), Pose{Vec3::Zero(), quat_from_rpy(0, 0, kPi / 2)});
    CHECK(e.d_rot == doctest::Approx(kPi / 2).epsilon(1e-12));
  }

  TEST_CASE("symmetric, non-negative, double cover folded") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
      Quat qa(n(rng), n(rng), n(rng), n(rng));
      Quat qb(n(rng), n(rng), n(rng), n(rng));
      qa.normalize();
      qb.normalize();
      const Pose a{Vec3(n(rng), n(rng), n(rng)), qa};
      const Pose b{Vec3(n(rng), n(rng), n(rng)), qb};
      const PoseError ab = pose_error(a, b);
      const PoseError ba = pose_error(b, a);
      CHECK(ab.d_pos == doctest::Approx(ba.d_pos).epsilon(1e-12));
      CHECK(ab.d_rot == doctest::Approx(ba.d_rot).epsilon(1e-9));
      CHECK(ab.d_rot >= 0.0);
      CHECK(ab.d_rot <= kPi + 1e-12);
      // Reference form 2·acos(min(1, |<qa, qb>|)).
      const double ref = 2.0 * std::acos(std::min(1.0, std::abs(qa.dot(qb))));
      CHECK(ab.d_rot == doctest::Approx(ref).epsilon(1e-6));
      const Pose neg{a.position, Quat(-qa.w(), -qa.x(), -qa.y(), -qa.z())};
      CHECK(pose_error(a, neg).d_rot == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
}
