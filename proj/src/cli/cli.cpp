#include "interact/cli/cli.hpp"

#include "interact/error.hpp"
#include "interact/gateway/server.hpp"
#include "interact/lang/dot.hpp"
#include "interact/lang/format.hpp"
#include "interact/lang/lint.hpp"
#include "interact/lang/parser.hpp"
#include "interact/replay/hash.hpp"
#include "interact/replay/replay.hpp"

#include "CLI11.hpp"

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace interact::cli {

namespace {

/// Unreadable or unwritable files; maps to the usage/IO exit code.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw IoError("cannot write " + path);
}

void print_diagnostics(std::ostream& err, const std::string& file, const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds) {
    const SourceSpan span = d.span.value_or(SourceSpan{});
    err << severity_name(d.severity) << ' ' << d.code << ' ' << file << ':' << span.line << ':' << span.column << ' '
        << d.message << '\n';
  }
}

/// Parsed scenario, or nullptr after printing the diagnostics.
std::shared_ptr<const Scenario> load_scenario(const std::string& file, std::ostream& err) {
  auto parsed = lang::parse(read_file(file));
  if (!parsed.scenario) {
    print_diagnostics(err, file, parsed.diagnostics);
    return nullptr;
  }
  return std::make_shared<const Scenario>(std::move(*parsed.scenario));
}

int cmd_validate(const std::string& file, std::ostream& err) {
  auto parsed = lang::parse(read_file(file));
  std::vector<Diagnostic> ds = parsed.diagnostics;
  if (parsed.scenario) {
    auto extra = lang::lint_checks(*parsed.scenario, true);
    lang::attach_spans(extra, parsed.source_map);
    ds.insert(ds.end(), extra.begin(), extra.end());
  }
  print_diagnostics(err, file, ds);
  return has_errors(ds) ? kExitFailure : kExitOk;
}

int cmd_fmt(const std::string& file, bool write, std::ostream& out, std::ostream& err) {
  const auto s = load_scenario(file, err);
  if (!s) return kExitFailure;
  const std::string text = lang::format_canonical(*s);
  if (write) {
    write_file(file, text);
  } else {
    out << text;
  }
  return kExitOk;
}

int cmd_graph(const std::string& file, std::ostream& out, std::ostream& err) {
  const auto s = load_scenario(file, err);
  if (!s) return kExitFailure;
  out << lang::export_graph_dot(*s);
  return kExitOk;
}

struct RunArgs {
  std::string file;
  std::string trace;
  std::string difficulty;
  std::string record;
  std::optional<std::uint64_t> ticks;
  bool hash = false;
};

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  const auto s = load_scenario(a.file, err);
  if (!s) return kExitFailure;
  std::vector<replay::TraceRecord> records;
  try {
    records = replay::parse_trace(read_file(a.trace));
  } catch (const EngineError& e) {
    err << "error: " << a.trace << ": " << e.what() << '\n';
    return kExitUsage;
  }
  const std::string difficulty = a.difficulty.empty() ? s->difficulties_or_default().front().id : a.difficulty;
  replay::RunOptions opts;
  opts.ticks = a.ticks;
  opts.stop_when_finished = true;
  const auto result = replay::record(s, difficulty, records, opts);
  if (!a.record.empty()) write_file(a.record, replay::write_log(result.log));

  session::Json report = session::score_to_json(result.report);
  if (a.hash) report["state_hash"] = replay::hex16(result.log.final_hash);
  out << report.dump() << '\n';
  if (result.report.abandoned) err << "warning: trace ended with steps remaining; scored as abandoned\n";
  return kExitOk;
}

int cmd_replay(const std::string& log_file, const std::string& scenario_file, std::ostream& out, std::ostream& err) {
  const auto s = load_scenario(scenario_file, err);
  if (!s) return kExitFailure;
  replay::ReplayLog log;
  try {
    log = replay::parse_log(read_file(log_file));
  } catch (const EngineError& e) {
    err << "error: " << log_file << ": " << e.what() << '\n';
    return kExitUsage;
  }
  replay::ReplayResult r;
  try {
    r = replay::replay(log, s);
  } catch (const EngineError& e) {
    err << "error: " << e.code() << ": " << e.what() << '\n';
    return kExitFailure;
  }
  if (r.ok) {
    out << session::Json{{"ok", true}, {"final_tick", log.final_tick}}.dump() << '\n';
    return kExitOk;
  }
  out << session::Json{{"ok", false}, {"divergent_tick", *r.divergent_tick}, {"reason", r.reason}}.dump() << '\n';
  err << "divergence at tick " << *r.divergent_tick << ": " << r.reason << '\n';
  return kExitFailure;
}

int cmd_serve(unsigned short port, std::string dir, std::uint64_t divisor, std::ostream& err) {
  if (dir.empty()) {
    const char* env = std::getenv("INTERACT_SCENARIO_DIR");
    dir = env && *env ? env : "scenarios";
  }
  gateway::Gateway gw({dir, divisor});
  gw.list();  // fail fast on an unreadable directory

  // Signals are taken by a dedicated thread so stopping happens outside a
  // signal handler.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  gateway::Server server(gw, port, err);
  err << "serving " << dir << " on port " << server.port() << '\n';
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
  });
  server.run();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kExitOk;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scenario engine for interactive assembly training", "interact"};
  app.require_subcommand(1);

  std::string file;
  auto* validate = app.add_subcommand("validate", "Print diagnostics for a scenario file");
  validate->add_option("file", file, "Scenario file")->required();

  bool write = false;
  auto* fmt = app.add_subcommand("fmt", "Print or rewrite the canonical form");
  fmt->add_option("file", file, "Scenario file")->required();
  fmt->add_flag("--write", write, "Rewrite the file in place");

  bool dot = false;
  auto* graph = app.add_subcommand("graph", "Export the step graph");
  graph->add_option("file", file, "Scenario file")->required();
  graph->add_flag("--dot", dot, "Graphviz DOT output")->required();

  RunArgs run_args;
  std::uint64_t ticks = 0;
  auto* run = app.add_subcommand("run", "Play a trace and print the score report as JSON");
  run->add_option("file", run_args.file, "Scenario file")->required();
  run->add_option("--trace", run_args.trace, "Trace file (JSON Lines)")->required();
  run->add_option("--difficulty", run_args.difficulty, "Difficulty id");
  run->add_option("--record", run_args.record, "Write the replay log here");
  auto* ticks_opt = run->add_option("--ticks", ticks, "Exact number of ticks to run");
  run->add_flag("--hash", run_args.hash, "Add the final state hash to the report");

  std::string log_file;
  std::string scenario_file;
  auto* replay_cmd = app.add_subcommand("replay", "Verify a replay log");
  replay_cmd->add_option("log", log_file, "Replay log")->required();
  replay_cmd->add_option("--scenario", scenario_file, "Scenario file")->required();

  unsigned short port = 8080;
  std::string dir;
  std::uint64_t divisor = 6;
  auto* serve = app.add_subcommand("serve", "Start the HTTP and streaming gateway");
  serve->add_option("--port", port, "Listen port");
  serve->add_option("--scenario-dir", dir, "Scenario directory (default $INTERACT_SCENARIO_DIR)");
  serve->add_option("--stream-divisor", divisor, "Send a frame every N ticks")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(file, err);
    if (*fmt) return cmd_fmt(file, write, out, err);
    if (*graph) return cmd_graph(file, out, err);
    if (*run) {
      if (*ticks_opt) run_args.ticks = ticks;
      return cmd_run(run_args, out, err);
    }
    if (*replay_cmd) return cmd_replay(log_file, scenario_file, out, err);
    if (*serve) return cmd_serve(port, dir, divisor, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const EngineError& e) {
    err << "error: " << e.code() << ": " << e.what() << '\n';
    return e.code() == "E_SCENARIO_DIR" || e.code() == "E_BIND" ? kExitUsage : kExitFailure;
  }
  return kExitUsage;
}

}  // namespace interact::cli
