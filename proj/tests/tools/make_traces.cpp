// Regenerates the scripted laser-cutter traces under scenarios/traces from
// the closed-loop agent. Usage: make_traces <out-dir>
#include "agent.hpp"
#include "corpus.hpp"
#include "interact/replay/replay.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_traces <out-dir>\n";
    return 2;
  }
  const std::filesystem::path out = argv[1];
  const auto sc = testing_support::load_corpus("laser_cutter");

  const auto perfect = testing_support::run_agent(sc, "standard");
  std::ofstream(out / "laser_cutter_perfect.jsonl") << interact::replay::format_trace(perfect.records);

  testing_support::AgentPlan plan;
  plan.hints["unmount_lens"] = 2;
  plan.skips.insert("wipe_nozzle");
  const auto assisted = testing_support::run_agent(sc, "expert", plan);
  std::ofstream(out / "laser_cutter_hints_skip.jsonl") << interact::replay::format_trace(assisted.records);

  std::cout << "perfect: " << perfect.report.total << " in " << perfect.ticks << " ticks\n"
            << "hints+skip: " << assisted.report.total << " in " << assisted.ticks << " ticks\n";
  return 0;
}
