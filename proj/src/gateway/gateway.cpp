#include "interact/gateway/gateway.hpp"

#include "interact/error.hpp"
#include "interact/lang/parser.hpp"
#include "interact/replay/hash.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace interact::gateway {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw EngineError("E_IO", "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_error(const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds) {
    if (d.severity != Severity::kError) continue;
    std::string pos = d.span ? std::to_string(d.span->line) + ":" + std::to_string(d.span->column) + " " : "";
    return d.code + " " + pos + d.message;
  }
  return {};
}

}  // namespace

std::vector<CatalogEntry> list_scenarios(const fs::path& dir) {
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec) throw EngineError("E_SCENARIO_DIR", "cannot read scenario directory " + dir.string() + ": " + ec.message());

  std::vector<CatalogEntry> out;
  for (const auto& entry : it) {
    if (!entry.is_regular_file() || entry.path().extension() != ".itx") continue;
    CatalogEntry c;
    c.id = entry.path().stem().string();
    c.path = entry.path().string();
    try {
      const auto parsed = lang::parse(read_file(entry.path()));
      if (parsed.scenario) {
        c.valid = true;
        c.name = parsed.scenario->name;
        c.step_count = parsed.scenario->steps.size();
        for (const auto& d : parsed.scenario->difficulties_or_default()) c.difficulties.push_back(d.id);
      } else {
        c.error = first_error(parsed.diagnostics);
      }
    } catch (const EngineError& e) {
      c.error = std::string(e.code()) + " " + e.what();
    }
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const CatalogEntry& a, const CatalogEntry& b) { return a.id < b.id; });
  return out;
}

Json catalog_to_json(const std::vector<CatalogEntry>& entries) {
  Json out = Json::array();
  for (const auto& c : entries) {
    Json j = {{"id", c.id}, {"valid", c.valid}};
    if (c.valid) {
      j["name"] = c.name;
      j["step_count"] = c.step_count;
      j["difficulties"] = c.difficulties;
    } else {
      j["error"] = c.error;
    }
    out.push_back(std::move(j));
  }
  return out;
}

ClientCommand command_from_json(const Json& j) {
  if (j.is_object() && j.contains("kind") && j.at("kind").is_string()) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "pause") return Control::kPause;
    if (kind == "resume") return Control::kResume;
    if (kind == "abandon") return Control::kAbandon;
  }
  return session::input_from_json(j);
}

Json wire_frame(const session::Session& s, const std::vector<std::string>& fired,
                const std::vector<std::string>& completed) {
  Json bodies = Json::array();
  for (const auto& b : s.world().bodies()) {
    Json j = session::pose_to_json(b.pose);
    j["id"] = b.id;
    bodies.push_back(std::move(j));
  }
  Json cables = Json::array();
  for (const auto& wc : s.world().cables()) {
    Json nodes = Json::array();
    for (const auto& p : wc.cable.positions) nodes.push_back({p.x(), p.y(), p.z()});
    cables.push_back({{"id", wc.cable.id}, {"nodes", std::move(nodes)}});
  }
  Json steps = Json::array();
  Json active = Json::array();
  for (std::size_t i = 0; i < s.steps().size(); ++i) {
    const auto& def = s.scenario().steps[i];
    const auto status = s.steps()[i].status;
    steps.push_back({{"id", def.id}, {"status", session::status_name(status)}});
    if (status != session::StepStatus::kActive) continue;
    Json a = {{"id", def.id}};
    if (s.difficulty().instructions_enabled && !def.instruction.empty()) a["instruction"] = def.instruction;
    active.push_back(std::move(a));
  }
  Json helpers = Json::array();
  for (const auto& h : s.helpers()) helpers.push_back(session::helper_to_json(h));
  return {{"tick", s.tick_count()},       {"bodies", std::move(bodies)},   {"cables", std::move(cables)},
          {"steps", std::move(steps)},    {"active_steps", std::move(active)}, {"helpers", std::move(helpers)},
          {"fired_events", fired},        {"newly_completed", completed},  {"score_partial", s.score_partial()}};
}

LiveSession::LiveSession(std::string id, std::shared_ptr<const Scenario> scenario, const std::string& difficulty,
                         std::uint64_t stream_divisor)
    : id_(std::move(id)), divisor_(std::max<std::uint64_t>(1, stream_divisor)), session_(std::move(scenario), difficulty) {}

session::ScoreReport LiveSession::report_locked() const { return session_.finalize(!session_.finished()); }

Json LiveSession::final_message_locked() {
  ended_ = true;
  return {{"final", session::score_to_json(report_locked())}};
}

std::optional<Json> LiveSession::enqueue(const ClientCommand& cmd) {
  std::lock_guard lk(mu_);
  if (ended_) throw EngineError("E_SESSION_FINISHED", "session " + id_ + " has ended");
  if (const auto* c = std::get_if<Control>(&cmd)) {
    switch (*c) {
      case Control::kPause: paused_ = true; break;
      case Control::kResume: paused_ = false; break;
      case Control::kAbandon:
        abandoned_ = true;
        return final_message_locked();
    }
    return std::nullopt;
  }
  queue_.push_back(std::get<session::UserInput>(cmd));
  return std::nullopt;
}

LiveSession::Output LiveSession::advance() {
  std::lock_guard lk(mu_);
  Output out;
  if (ended_ || paused_) return out;

  const std::uint64_t tick = session_.tick_count();
  for (const auto& in : queue_) records_.push_back({tick, in});
  const auto frame = session_.tick(queue_);
  queue_.clear();
  fired_since_frame_.insert(fired_since_frame_.end(), frame.fired_events.begin(), frame.fired_events.end());
  completed_since_frame_.insert(completed_since_frame_.end(), frame.newly_completed.begin(),
                                frame.newly_completed.end());
  if (session_.tick_count() % replay::kCheckpointInterval == 0) {
    checkpoints_.push_back({session_.tick_count(), replay::state_hash(session_)});
  }
  if (session_.finished()) out.final = final_message_locked();
  if (session_.tick_count() % divisor_ == 0 || out.final) {
    out.frame = wire_frame(session_, fired_since_frame_, completed_since_frame_);
    fired_since_frame_.clear();
    completed_since_frame_.clear();
  }
  return out;
}

Json LiveSession::state() const {
  std::lock_guard lk(mu_);
  Json j = {{"id", id_},
            {"scenario", session_.scenario().name},
            {"difficulty", session_.difficulty().id},
            {"paused", paused_},
            {"finished", ended_},
            {"abandoned", abandoned_},
            {"flags", session_.flags()},
            {"state_hash", replay::hex16(replay::state_hash(session_))},
            {"frame", wire_frame(session_, {}, {})}};
  if (ended_) j["report"] = session::score_to_json(report_locked());
  return j;
}

std::string LiveSession::replay_log() const {
  std::lock_guard lk(mu_);
  replay::ReplayLog log;
  const Scenario& s = session_.scenario();
  log.header = {s.name, replay::scenario_hash(s), session_.difficulty().id, session_.dt(), replay::kEngineVersion};
  log.records = records_;
  log.checkpoints = checkpoints_;
  log.final_tick = session_.tick_count();
  log.final_hash = replay::state_hash(session_);
  log.final_report = session::score_to_json(report_locked());
  return replay::write_log(log);
}

std::uint64_t LiveSession::state_hash() const {
  std::lock_guard lk(mu_);
  return replay::state_hash(session_);
}

bool LiveSession::finished() const {
  std::lock_guard lk(mu_);
  return ended_;
}

Gateway::Gateway(GatewayConfig cfg) : cfg_(std::move(cfg)) {}

Json Gateway::list() const { return catalog_to_json(list_scenarios(cfg_.scenario_dir)); }

std::string Gateway::create_session(const std::string& scenario_id, const std::string& difficulty) {
  const fs::path path = cfg_.scenario_dir / (scenario_id + ".itx");
  // The id is a file stem; anything that could escape the directory is unknown.
  if (scenario_id.empty() || scenario_id.find_first_of("/\\") != std::string::npos || scenario_id[0] == '.' ||
      !fs::is_regular_file(path)) {
    throw EngineError("E_NOT_FOUND", "unknown scenario '" + scenario_id + "'");
  }
  auto parsed = lang::parse(read_file(path));
  if (!parsed.scenario) throw EngineError("E_INVALID_SCENARIO", first_error(parsed.diagnostics));
  auto scenario = std::make_shared<const Scenario>(std::move(*parsed.scenario));

  std::lock_guard lk(mu_);
  std::string id = "s" + std::to_string(next_id_);
  const std::string level = difficulty.empty() ? scenario->difficulties_or_default().front().id : difficulty;
  auto live = std::make_shared<LiveSession>(id, std::move(scenario), level, cfg_.stream_divisor);
  ++next_id_;
  sessions_.emplace(id, std::move(live));
  return id;
}

std::shared_ptr<LiveSession> Gateway::find(const std::string& id) const {
  std::lock_guard lk(mu_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

}  // namespace interact::gateway
