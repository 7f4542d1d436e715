#include "corpus.hpp"
#include "interact/error.hpp"
#include "interact/session/score.hpp"
#include "interact/session/session.hpp"
#include "interact/session/wire.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace interact;
using namespace interact::session;

namespace {

constexpr double kDt = 1.0 / 120.0;

// A bench with a slot, a peg to place there, a rag to wipe the bench with
// and a button. `steps` and `events` are spliced in.
std::shared_ptr<const Scenario> bench(const std::string& steps, const std::string& events = "") {
  return testing_support::parse_or_throw(R"(scenario "bench" {
  part bench { shape = box(0.5, 0.5, 0.05); mass = 0; pose = (0, 0, 0) rpy(0, 0, 0);
    anchor slot = (0.2, 0, 0.1) rpy(0, 0, 0); anchor rack = (-0.3, 0.3, 0.3) rpy(0, 0, 0); }
  part peg { shape = sphere(0.03); mass = 0.2; pose = (0, 0.3, 0.08) rpy(0, 0, 0); grabbable = true; }
  part rag { shape = box(0.04, 0.04, 0.01); mass = 0.05; pose = (-0.3, -0.3, 0.06) rpy(0, 0, 0); grabbable = true; }
  region zone = sphere((0.2, 0, 0.1), 0.05) on bench;
)" + steps + events + R"(
  difficulty easy { ghost = true; trajectory = true; instructions = true; hint_penalty = 15; par_time_scale = 1; }
  difficulty blind { ghost = false; trajectory = false; instructions = false; hint_penalty = 15; par_time_scale = 1; }
})");
}

const char* kPlace = R"(
  step place : placing { part = peg; target = anchor(bench, slot); tol = pos 0.01 rot 5 deg; dwell = 1.0;
    requires = start; par_time = 20; instruction = "Put the peg in the slot."; hint = "Slot is on the right."; }
)";
const char* kPress = R"(
  step press : action { action_id = go; requires = done(place); par_time = 5; instruction = "Press go."; hint = "Green."; }
)";

Pose slot_pose() { return Pose::from_position(Vec3(0.2, 0, 0.1)); }

// Grabs the peg with the hand at the peg's pose, so hand pose = peg pose.
void grab_peg(Session& s) {
  const Pose peg = s.world().find("peg")->pose;
  s.tick({HandPose{peg}, Grab{"peg"}});
}

std::size_t count_kind(const Session& s, const std::string& kind) {
  return std::count_if(s.log().begin(), s.log().end(), [&](const LogRecord& r) { return r.kind == kind; });
}

}  // namespace

TEST_SUITE("session") {
  TEST_CASE("start-required step is active at start") {
    Session s(bench(kPlace), "easy");
    CHECK(s.step_state("place").status == StepStatus::kActive);
    CHECK(s.tick_count() == 0);
    CHECK(s.clock() == 0.0);
  }

  TEST_CASE("dependent step stays locked") {
    Session s(bench(std::string(kPlace) + kPress), "easy");
    CHECK(s.step_state("place").status == StepStatus::kActive);
    CHECK(s.step_state("press").status == StepStatus::kLocked);
  }

  TEST_CASE("laser cutter starts with only the power-off step") {
    Session s(testing_support::load_corpus("laser_cutter"), "standard");
    std::vector<std::string> active;
    for (std::size_t i = 0; i < s.steps().size(); ++i)
      if (s.steps()[i].status == StepStatus::kActive) active.push_back(s.scenario().steps[i].id);
    CHECK(active == std::vector<std::string>{"power_off"});
  }

  TEST_CASE("unknown difficulty names the valid ones") {
    try {
      Session s(bench(kPlace), "nightmare");
      FAIL("accepted");
    } catch (const EngineError& e) {
      CHECK(e.code() == "E_UNKNOWN_DIFFICULTY");
      CHECK(std::string(e.what()).find("easy") != std::string::npos);
      CHECK(std::string(e.what()).find("blind") != std::string::npos);
    }
  }

  TEST_CASE("dwell completes on the 120th in-tolerance tick") {
    Session s(bench(kPlace), "easy");
    grab_peg(s);
    int in_tol = 0;
    for (int i = 0; i < 400 && s.step_state("place").status == StepStatus::kActive; ++i) {
      const auto f = s.tick({HandPose{slot_pose()}});
      const PoseError e = pose_error(s.world().find("peg")->pose, slot_pose());
      if (e.d_pos <= 0.01 && e.d_rot <= deg_to_rad(5)) ++in_tol;
      if (!f.newly_completed.empty()) CHECK(f.newly_completed == std::vector<std::string>{"place"});
    }
    CHECK(s.step_state("place").status == StepStatus::kCompleted);
    CHECK(in_tol == 120);
    CHECK(s.step_state("place").residual.d_pos <= 1e-12);
  }

  TEST_CASE("leaving tolerance resets the dwell") {
    Session s(bench(kPlace), "easy");
    grab_peg(s);
    for (int i = 0; i < 100; ++i) s.tick({HandPose{slot_pose()}});
    s.tick({HandPose{Pose::from_position(Vec3(0.3, 0, 0.1))}});
    for (int i = 0; i < 119; ++i) s.tick({HandPose{slot_pose()}});
    CHECK(s.step_state("place").status == StepStatus::kActive);
    s.tick({});
    CHECK(s.step_state("place").status == StepStatus::kCompleted);
  }

  TEST_CASE("rotation just past tolerance never completes") {
    Session s(bench(kPlace), "easy");
    grab_peg(s);
    const Pose off{slot_pose().position, Quat(Eigen::AngleAxisd(deg_to_rad(5) + 1e-6, Vec3::UnitZ()))};
    for (int i = 0; i < 400; ++i) s.tick({HandPose{off}});
    CHECK(s.step_state("place").status == StepStatus::kActive);
    CHECK(s.step_state("place").in_tolerance_ticks == 0);
  }

  TEST_CASE("completion welds the part to the target") {
    Session s(bench(kPlace), "easy");
    grab_peg(s);
    for (int i = 0; i < 130; ++i) s.tick({HandPose{slot_pose()}});
    REQUIRE(s.step_state("place").status == StepStatus::kCompleted);
    CHECK_FALSE(s.grabbed_part());
    const auto* w = s.world().weld_of("peg");
    REQUIRE(w);
    CHECK(w->parent == "bench");
  }

  TEST_CASE("completion event unwelds a part, which is dynamic next tick") {
    const auto sc = bench(std::string(kPlace) + R"(
  step wait : action { action_id = go; requires = start; par_time = 5; instruction = "x"; hint = "h"; }
)", R"(
  event hold_rag { when = time(0); do = weld(rag, bench.rack); }
  event free_rag { when = completed(wait); do = unweld(rag); }
)");
    Session s(sc, "easy");
    CHECK(s.world().weld_of("rag") != nullptr);
    const auto f = s.tick({Press{"go"}});
    CHECK(std::find(f.fired_events.begin(), f.fired_events.end(), "free_rag") != f.fired_events.end());
    CHECK(s.world().weld_of("rag") == nullptr);
    const double z = s.world().find("rag")->pose.position.z();
    s.tick({});
    CHECK(s.world().find("rag")->pose.position.z() < z);
  }

  TEST_CASE("hints") {
    Session s(bench(std::string(kPlace) + kPress), "easy");
    CHECK(s.request_hint("place") == "Slot is on the right.");
    CHECK(s.step_state("place").hints == 1);
    try {
      s.request_hint("press");
      FAIL("hint on locked step");
    } catch (const EngineError& e) {
      CHECK(e.code() == "E_STEP_NOT_ACTIVE");
    }
    CHECK_THROWS_AS(s.request_hint("nosuch"), EngineError);
  }

  TEST_CASE("two hints at penalty 15 leave 70") {
    const auto sc = bench(R"(
  step press : action { action_id = go; requires = start; par_time = 5; instruction = "x"; hint = "h"; }
)");
    Session s(sc, "easy");
    s.request_hint("press");
    s.request_hint("press");
    s.tick({Press{"go"}});
    const auto r = s.finalize();
    REQUIRE(r.steps.size() == 1);
    CHECK(r.steps[0].time_factor == 1.0);
    CHECK(r.steps[0].accuracy_factor == 1.0);
    CHECK(r.steps[0].step_score == 70.0);
    CHECK(r.total == 70.0);
  }

  TEST_CASE("skipping a placing step teleports, welds and unlocks") {
    Session s(bench(std::string(kPlace) + kPress), "easy");
    s.skip_step("place");
    CHECK(s.step_state("place").status == StepStatus::kSkipped);
    CHECK(s.step_state("press").status == StepStatus::kActive);
    const Pose peg = s.world().find("peg")->pose;
    CHECK((peg.position - slot_pose().position).norm() == 0.0);
    CHECK_THROWS_AS(s.skip_step("place"), EngineError);
    s.tick({Press{"go"}});
    const auto r = s.finalize();
    CHECK(r.steps[0].skipped);
    CHECK(r.steps[0].step_score == 0.0);
    CHECK(r.steps[1].step_score == 100.0);
    CHECK(r.total == 50.0);
  }

  TEST_CASE("finalize needs terminal steps unless abandoned") {
    Session s(bench(std::string(kPlace) + kPress), "easy");
    try {
      s.finalize();
      FAIL("finalized early");
    } catch (const EngineError& e) {
      CHECK(e.code() == "E_SESSION_INCOMPLETE");
    }
    const auto r = s.finalize(true);
    CHECK(r.abandoned);
    for (const auto& st : r.steps) {
      CHECK(st.incomplete);
      CHECK(st.step_score == 0.0);
    }
    CHECK(r.total == 0.0);
  }

  TEST_CASE("min time holds back an early press") {
    Session s(bench(R"(
  step press : action { action_id = go; requires = start; min_time = 1; par_time = 5; instruction = "x"; hint = "h"; }
)"),
              "easy");
    for (int i = 0; i < 119; ++i) s.tick({Press{"go"}});
    CHECK(s.step_state("press").status == StepStatus::kActive);
    s.tick({Press{"go"}});
    CHECK(s.step_state("press").status == StepStatus::kCompleted);
  }

  TEST_CASE("tool contact accumulates to the contact time") {
    Session s(bench(R"(
  step wipe : tooluse { tool = rag; part = bench; contact_time = 0.5; requires = start; par_time = 10;
    instruction = "Wipe the bench."; hint = "Rub it."; }
)"),
              "easy");
    const Pose rag = s.world().find("rag")->pose;
    s.tick({HandPose{rag}, Grab{"rag"}});
    std::uint64_t contacts = s.step_state("wipe").contact_ticks;
    int ticks = 1;
    Pose pressed = rag;
    pressed.position.z() -= 0.002;
    while (s.step_state("wipe").status == StepStatus::kActive && ticks < 500) {
      s.tick({HandPose{pressed}});
      ++ticks;
    }
    CHECK(s.step_state("wipe").status == StepStatus::kCompleted);
    CHECK(s.step_state("wipe").contact_ticks == 60);
    CHECK(contacts <= 1);
  }

  TEST_CASE("time and region events") {
    const auto sc = bench(kPlace, R"(
  event later { when = time(2); do = set_flag(late); }
  event arrived { when = entered(peg, zone); do = particles(zone); }
)");
    Session s(sc, "easy");
    grab_peg(s);
    std::uint64_t late_at = 0, arrived_at = 0;
    for (int i = 0; i < 300; ++i) {
      const auto f = s.tick({HandPose{i < 10 ? s.world().find("peg")->pose : slot_pose()}});
      for (const auto& e : f.fired_events) {
        if (e == "later") late_at = f.tick;
        if (e == "arrived") arrived_at = f.tick;
      }
    }
    CHECK(late_at == 240);
    // Grab on tick 1, ten still ticks, then the move into the zone on tick 12.
    CHECK(arrived_at == 12);
    CHECK(s.flags().count("late") == 1);
  }

  TEST_CASE("bad inputs are rejected and logged") {
    Session s(bench(kPlace), "easy");
    const Pose nan_pose{Vec3(std::nan(""), 0, 0), Quat::Identity()};
    s.tick({Grab{"ghost"}, Grab{"bench"}, Press{"nope"}, HintRequest{"nope"}, SkipRequest{"nope"}, SetFlag{"nope"},
            HandPose{nan_pose}});
    CHECK(count_kind(s, "rejected") == 7);
    CHECK_FALSE(s.grabbed_part());
    CHECK_FALSE(s.hand());
  }

  TEST_CASE("single hand: a second grab releases the first") {
    Session s(bench(kPlace), "easy");
    s.tick({HandPose{s.world().find("peg")->pose}, Grab{"peg"}});
    CHECK(s.grabbed_part() == std::optional<std::string>("peg"));
    s.tick({Grab{"rag"}});
    CHECK(s.grabbed_part() == std::optional<std::string>("rag"));
    CHECK(s.world().grabs().size() == 1);
    s.tick({Release{}});
    CHECK_FALSE(s.grabbed_part());
  }

  TEST_CASE("helpers follow the difficulty") {
    SUBCASE("easy shows everything but the hint") {
      Session s(bench(kPlace), "easy");
      const auto h = s.helpers();
      REQUIRE(h.size() == 1);
      CHECK(h[0].ghost);
      CHECK(h[0].trajectory.size() == static_cast<std::size_t>(kTrajectoryPoints));
      CHECK(h[0].instruction == std::optional<std::string>("Put the peg in the slot."));
      CHECK_FALSE(h[0].hint);
      const Pose start = s.world().find("peg")->pose;
      CHECK((h[0].trajectory.front().position - start.position).norm() <= 1e-12);
      CHECK(h[0].trajectory.back() == *h[0].ghost);
      CHECK((h[0].ghost->position - slot_pose().position).norm() <= 1e-12);
    }
    SUBCASE("blind shows nothing until a hint") {
      Session s(bench(kPlace), "blind");
      auto h = s.helpers();
      REQUIRE(h.size() == 1);
      CHECK_FALSE(h[0].ghost);
      CHECK(h[0].trajectory.empty());
      CHECK_FALSE(h[0].instruction);
      s.request_hint("place");
      h = s.helpers();
      CHECK(h[0].ghost);
      CHECK(h[0].trajectory.size() == static_cast<std::size_t>(kTrajectoryPoints));
      CHECK(h[0].hint == std::optional<std::string>("Slot is on the right."));
      CHECK_FALSE(h[0].instruction);
    }
  }

  TEST_CASE("clock is ticks times dt") {
    Session s(bench(kPlace), "easy");
    for (int i = 0; i < 37; ++i) s.tick({});
    CHECK(s.clock() == 37 * s.dt());
    CHECK(s.dt() == kDt);
  }

  TEST_CASE("ticks_for rounds up and tolerates round-off") {
    CHECK(ticks_for(1.0, kDt) == 120);
    CHECK(ticks_for(0.5, kDt) == 60);
    CHECK(ticks_for(0.0, kDt) == 0);
    CHECK(ticks_for(-1.0, kDt) == 0);
    CHECK(ticks_for(0.001, kDt) == 1);
    CHECK(ticks_for(10 * kDt, kDt) == 10);
  }
}

TEST_SUITE("score") {
  TEST_CASE("perfect placement within par") {
    const double tf = time_factor(5, 10);
    const double af = accuracy_factor({0, 0}, 0.01, 0.1);
    CHECK(step_score(tf, af, 10, 0) == 100.0);
  }

  TEST_CASE("residuals at tolerance halve the score") {
    CHECK(step_score(1.0, accuracy_factor({0.01, 0.1}, 0.01, 0.1), 10, 0) == 50.0);
  }

  TEST_CASE("twice par hits the floor") {
    CHECK(time_factor(20, 10) == 0.5);
    CHECK(time_factor(40, 10) == 0.5);
    CHECK(step_score(time_factor(20, 10), 1.0, 0, 0) == 50.0);
    CHECK(time_factor(15, 10) == doctest::Approx(0.75));
  }

  TEST_CASE("time factor never rises with duration") {
    double prev = 2.0;
    for (double t = 0; t < 50; t += 0.01) {
      const double tf = time_factor(t, 10);
      CHECK(tf <= prev);
      CHECK(tf >= 0.5);
      CHECK(tf <= 1.0);
      prev = tf;
    }
  }

  TEST_CASE("hints never raise a score and the score stays in range") {
    for (int hints = 0; hints < 12; ++hints) {
      const double a = step_score(0.8, 0.9, 15, hints);
      const double b = step_score(0.8, 0.9, 15, hints + 1);
      CHECK(b <= a);
      CHECK(b >= 0.0);
    }
  }

  TEST_CASE("half away from zero to one decimal") {
    CHECK(round_tenth(0.05) == 0.1);
    CHECK(round_tenth(0.15) == 0.2);
    CHECK(round_tenth(2.25) == 2.3);
    CHECK(round_tenth(-0.05) == -0.1);
    CHECK(round_tenth(1270.0 / 14.0) == 90.7);
    CHECK(round_tenth(100.0) == 100.0);
    CHECK(round_tenth(66.6666) == 66.7);
  }

  TEST_CASE("session total is the rounded mean") {
    std::vector<StepScore> s(3);
    s[0].step_score = 100;
    s[1].step_score = 70;
    s[2].step_score = 0;
    CHECK(session_total(s) == 56.7);
    CHECK(session_total({}) == 0.0);
  }
}

TEST_SUITE("wire") {
  TEST_CASE("inputs round trip through JSON") {
    const std::vector<UserInput> inputs{HandPose{{Vec3(0.1, -2, 3.5), quat_from_rpy(0.1, 0.2, 0.3)}},
                                        Grab{"lens"},
                                        Release{},
                                        Press{"main_switch_off"},
                                        HintRequest{"unmount_lens"},
                                        SkipRequest{"wipe_nozzle"},
                                        SetFlag{"machine_off"}};
    for (const auto& in : inputs) {
      const Json j = input_to_json(in);
      const UserInput back = input_from_json(Json::parse(j.dump()));
      CHECK(back.index() == in.index());
      CHECK(input_to_json(back) == j);
    }
  }

  TEST_CASE("hand pose encoding uses w,x,y,z") {
    const Json j = input_to_json(HandPose{{Vec3(1, 2, 3), Quat(0.5, 0.5, -0.5, 0.5)}});
    CHECK(j["kind"] == "hand_pose");
    CHECK(j["pos"] == Json::array({1.0, 2.0, 3.0}));
    CHECK(j["quat"] == Json::array({0.5, 0.5, -0.5, 0.5}));
  }

  TEST_CASE("malformed inputs are rejected") {
    for (const char* text : {R"({"kind":"teleport"})", R"({"kind":"grab"})", R"({"kind":"hand_pose","pos":[1,2]})",
                             R"([1,2,3])", R"({"kind":"grab","part":7})"}) {
      INFO(text);
      CHECK_THROWS_AS(input_from_json(Json::parse(text)), EngineError);
    }
  }

  TEST_CASE("score and frame encodings") {
    Session s(bench(std::string(kPlace) + kPress), "easy");
    const FrameReport f = s.tick({});
    const Json fj = frame_to_json(f);
    CHECK(fj["tick"] == 1);
    CHECK(fj["helpers"].size() == 1);
    CHECK(fj["helpers"][0]["trajectory"].size() == static_cast<std::size_t>(kTrajectoryPoints));
    const Json sj = score_to_json(s.finalize(true));
    CHECK(sj["steps"].size() == 2);
    CHECK(sj["total"] == 0.0);
    CHECK(sj["steps"][0]["base"] == 100.0);
  }
}
