#include "interact/lang/parser.hpp"

#include "interact/lang/lexer.hpp"
#include "interact/scene/validate.hpp"

#include <cmath>
#include <set>

namespace interact::lang {

SourceSpan SourceMap::resolve(std::string_view location) const {
  std::string key(location);
  while (!key.empty()) {
    if (auto it = spans_.find(key); it != spans_.end()) return it->second;
    const auto dot = key.find_last_of('.');
    if (dot == std::string::npos) break;
    key.resize(dot);
  }
  return fallback_;
}

void attach_spans(std::vector<Diagnostic>& diags, const SourceMap& map) {
  for (auto& d : diags) {
    if (!d.span) d.span = map.resolve(d.location);
  }
}

namespace {

struct SyntaxError {
  SourceSpan span;
  std::string message;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, SourceMap& map, std::vector<Diagnostic>& diags)
      : toks_(std::move(toks)), map_(map), diags_(diags) {}

  std::optional<Scenario> run() {
    Scenario sc;
    try {
      expect_word("scenario");
      sc.name = expect(TokenKind::kString, "scenario name").text;
      map_.set_fallback(toks_[pos_ - 1].span);
      expect(TokenKind::kLBrace, "'{'");
    } catch (const SyntaxError& e) {
      error("E_SYNTAX", e.span, e.message);
      return std::nullopt;
    }
    while (!at(TokenKind::kRBrace) && !at(TokenKind::kEnd)) {
      const std::size_t item_start = pos_;
      try {
        parse_item(sc);
      } catch (const SyntaxError& e) {
        error("E_SYNTAX", e.span, e.message);
        recover(item_start);
      }
    }
    try {
      expect(TokenKind::kRBrace, "'}' closing the scenario");
      if (!at(TokenKind::kEnd)) fail(peek(), "unexpected content after the scenario block");
    } catch (const SyntaxError& e) {
      error("E_SYNTAX", e.span, e.message);
    }
    return sc;
  }

 private:
  // ---- token helpers -------------------------------------------------------

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(TokenKind k) const { return peek().kind == k; }
  bool at_word(std::string_view w) const { return peek().kind == TokenKind::kIdent && peek().text == w; }

  const Token& advance() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void fail(const Token& at, std::string msg) { throw SyntaxError{at.span, std::move(msg)}; }

  std::string describe(const Token& t) const {
    if (t.kind == TokenKind::kIdent) return "'" + t.text + "'";
    if (t.kind == TokenKind::kNumber) return "number " + t.text;
    return token_kind_name(t.kind);
  }

  const Token& expect(TokenKind k, const char* what) {
    if (!at(k)) fail(peek(), std::string("expected ") + what + ", found " + describe(peek()));
    return advance();
  }

  void expect_word(std::string_view w) {
    if (!at_word(w)) fail(peek(), "expected '" + std::string(w) + "', found " + describe(peek()));
    advance();
  }

  std::string expect_id(const char* what) { return expect(TokenKind::kIdent, what).text; }
  double expect_number(const char* what) { return expect(TokenKind::kNumber, what).number; }

  bool expect_bool() {
    if (at_word("true") || at_word("false")) return advance().text == "true";
    fail(peek(), "expected true or false, found " + describe(peek()));
  }

  SourceSpan span_from(std::size_t start) const {
    const SourceSpan& a = toks_[start].span;
    const SourceSpan& b = toks_[pos_ > start ? pos_ - 1 : start].span;
    SourceSpan s = a;
    s.length = b.offset + b.length - a.offset;
    return s;
  }

  void error(const char* code, SourceSpan span, std::string msg) {
    diags_.push_back({Severity::kError, code, std::move(msg), {}, span});
  }

  // Skips to the end of the item that started at `item_start`.
  void recover(std::size_t item_start) {
    int depth = 0;
    for (std::size_t i = item_start; i < pos_; ++i) {
      if (toks_[i].kind == TokenKind::kLBrace) ++depth;
      if (toks_[i].kind == TokenKind::kRBrace) --depth;
    }
    if (depth > 0) {
      while (!at(TokenKind::kEnd)) {
        const TokenKind k = advance().kind;
        if (k == TokenKind::kLBrace) ++depth;
        if (k == TokenKind::kRBrace && --depth == 0) return;
      }
      return;
    }
    while (!at(TokenKind::kEnd)) {
      if (at(TokenKind::kRBrace)) return;
      const TokenKind k = advance().kind;
      if (k == TokenKind::kSemicolon) return;
      if (k == TokenKind::kLBrace) {
        int d = 1;
        while (!at(TokenKind::kEnd) && d > 0) {
          const TokenKind k2 = advance().kind;
          if (k2 == TokenKind::kLBrace) ++d;
          if (k2 == TokenKind::kRBrace) --d;
        }
        return;
      }
    }
  }

  // Records a duplicate-field error; returns true for the first occurrence.
  bool note_field(std::set<std::string>& seen, const Token& name_tok) {
    if (seen.insert(name_tok.text).second) return true;
    error("E_DUPLICATE_FIELD", name_tok.span, "field '" + name_tok.text + "' given more than once");
    return false;
  }

  void require_fields(const std::set<std::string>& seen, std::initializer_list<const char*> names, const SourceSpan& at,
                      const std::string& what) {
    for (const char* n : names) {
      if (!seen.count(n)) error("E_MISSING_FIELD", at, what + " is missing required field '" + n + "'");
    }
  }

  // ---- grammar -------------------------------------------------------------

  void parse_item(Scenario& sc) {
    if (at_word("part")) return parse_part(sc);
    if (at_word("step")) return parse_step(sc);
    if (at_word("event")) return parse_event(sc);
    if (at_word("region")) return parse_region(sc);
    if (at_word("difficulty")) return parse_difficulty(sc);
    if (at_word("material")) return parse_material(sc);
    if (at_word("cable")) return parse_cable(sc);
    if (at_word("environment")) {
      advance();
      expect(TokenKind::kEquals, "'='");
      sc.environment = expect_id("environment name");
      expect(TokenKind::kSemicolon, "';'");
      return;
    }
    fail(peek(), "expected an item (part, step, event, region, difficulty, material, cable, environment), found " +
                     describe(peek()));
  }

  Vec3 parse_vec3() {
    expect(TokenKind::kLParen, "'('");
    Vec3 v;
    v.x() = expect_number("number");
    expect(TokenKind::kComma, "','");
    v.y() = expect_number("number");
    expect(TokenKind::kComma, "','");
    v.z() = expect_number("number");
    expect(TokenKind::kRParen, "')'");
    return v;
  }

  Placement parse_pose() {
    Placement p;
    p.position = parse_vec3();
    expect_word("rpy");
    p.rpy_deg = parse_vec3();
    return p;
  }

  ColliderShape parse_shape() {
    const Token& kind = expect(TokenKind::kIdent, "shape kind");
    expect(TokenKind::kLParen, "'('");
    ColliderShape out;
    if (kind.text == "sphere") {
      out = Sphere{expect_number("radius")};
    } else if (kind.text == "box") {
      Box b;
      b.half_extents.x() = expect_number("half extent");
      expect(TokenKind::kComma, "','");
      b.half_extents.y() = expect_number("half extent");
      expect(TokenKind::kComma, "','");
      b.half_extents.z() = expect_number("half extent");
      out = b;
    } else if (kind.text == "capsule") {
      Capsule c;
      c.radius = expect_number("radius");
      expect(TokenKind::kComma, "','");
      c.half_height = expect_number("half height");
      out = c;
    } else if (kind.text == "hull") {
      ConvexHull h;
      h.vertices.push_back(parse_vec3());
      while (at(TokenKind::kComma)) {
        advance();
        h.vertices.push_back(parse_vec3());
      }
      out = std::move(h);
    } else {
      fail(kind, "unknown shape '" + kind.text + "' (expected sphere, box, capsule or hull)");
    }
    expect(TokenKind::kRParen, "')'");
    return out;
  }

  void parse_part(Scenario& sc) {
    advance();
    const Token& id_tok = expect(TokenKind::kIdent, "part id");
    PartDef p;
    p.id = id_tok.text;
    const std::string loc = "part:" + p.id;
    map_.record(loc, id_tok.span);
    expect(TokenKind::kLBrace, "'{'");
    std::set<std::string> seen;
    while (!at(TokenKind::kRBrace)) {
      const Token& f = expect(TokenKind::kIdent, "part field");
      if (f.text == "anchor") {
        Anchor a;
        const Token& name = expect(TokenKind::kIdent, "anchor name");
        a.name = name.text;
        expect(TokenKind::kEquals, "'='");
        const std::size_t astart = pos_;
        a.local = parse_pose();
        map_.record(loc + ".anchor:" + a.name, span_from(astart));
        p.anchors.push_back(std::move(a));
        expect(TokenKind::kSemicolon, "';'");
        continue;
      }
      expect(TokenKind::kEquals, "'='");
      const std::size_t value_start = pos_;
      if (f.text == "shape") {
        p.shape = parse_shape();
      } else if (f.text == "mass") {
        p.mass = expect_number("mass");
      } else if (f.text == "pose") {
        p.initial_pose = parse_pose();
      } else if (f.text == "grabbable") {
        p.grabbable = expect_bool();
      } else if (f.text == "material") {
        p.material = expect_id("material name");
      } else {
        fail(f, "unknown part field '" + f.text + "'");
      }
      note_field(seen, f);
      map_.record(loc + "." + f.text, span_from(value_start));
      expect(TokenKind::kSemicolon, "';'");
    }
    expect(TokenKind::kRBrace, "'}'");
    require_fields(seen, {"shape"}, id_tok.span, "part '" + p.id + "'");
    sc.parts.push_back(std::move(p));
  }

  Cond parse_or() {
    std::vector<Cond> parts;
    parts.push_back(parse_and());
    while (at(TokenKind::kOrOr)) {
      advance();
      parts.push_back(parse_and());
    }
    if (parts.size() == 1) return std::move(parts.front());
    return Cond::any_of(std::move(parts));
  }

  Cond parse_and() {
    std::vector<Cond> parts;
    parts.push_back(parse_unary());
    while (at(TokenKind::kAndAnd)) {
      advance();
      parts.push_back(parse_unary());
    }
    if (parts.size() == 1) return std::move(parts.front());
    return Cond::all_of(std::move(parts));
  }

  Cond parse_unary() {
    if (at(TokenKind::kBang)) {
      advance();
      return Cond::negate(parse_unary());
    }
    if (at(TokenKind::kLParen)) {
      advance();
      Cond c = parse_or();
      expect(TokenKind::kRParen, "')'");
      return c;
    }
    if (at_word("start")) {
      advance();
      return Cond::start();
    }
    if (at_word("done") || at_word("flag")) {
      const bool is_done = advance().text == "done";
      expect(TokenKind::kLParen, "'('");
      std::string name = expect_id(is_done ? "step id" : "flag name");
      expect(TokenKind::kRParen, "')'");
      return is_done ? Cond::done(std::move(name)) : Cond::flag(std::move(name));
    }
    fail(peek(), "expected a condition (start, done(..), flag(..), '!', '('), found " + describe(peek()));
  }

  void parse_step(Scenario& sc) {
    advance();
    const Token& id_tok = expect(TokenKind::kIdent, "step id");
    StepDef st;
    st.id = id_tok.text;
    const std::string loc = "step:" + st.id;
    map_.record(loc, id_tok.span);
    expect(TokenKind::kColon, "':'");
    const Token& kind = expect(TokenKind::kIdent, "step kind");
    PlacingStep placing;
    ActionStep action;
    ToolUseStep tool;
    std::set<std::string> allowed;
    if (kind.text == "placing") {
      allowed = {"part", "target", "tol", "dwell"};
    } else if (kind.text == "action") {
      allowed = {"action_id"};
    } else if (kind.text == "tooluse") {
      allowed = {"tool", "part", "contact_time"};
    } else {
      fail(kind, "unknown step kind '" + kind.text + "' (expected placing, action or tooluse)");
    }
    expect(TokenKind::kLBrace, "'{'");
    std::set<std::string> seen;
    while (!at(TokenKind::kRBrace)) {
      const Token& f = expect(TokenKind::kIdent, "step field");
      const std::string fname = f.text;
      static const std::set<std::string> common = {"requires", "min_time", "par_time", "instruction", "hint"};
      static const std::set<std::string> known = {"part",     "target",       "tol",       "dwell",
                                                  "tool",     "contact_time", "action_id", "requires",
                                                  "min_time", "par_time",     "instruction", "hint"};
      if (!known.count(fname)) fail(f, "unknown step field '" + fname + "'");
      if (!common.count(fname) && !allowed.count(fname)) {
        error("E_FIELD_KIND", f.span, "field '" + fname + "' does not apply to " + kind.text + " steps");
      }
      expect(TokenKind::kEquals, "'='");
      const std::size_t value_start = pos_;
      if (fname == "part") {
        std::string v = expect_id("part id");
        placing.part = v;
        tool.target = v;
      } else if (fname == "target") {
        expect_word("anchor");
        expect(TokenKind::kLParen, "'('");
        placing.target_part = expect_id("part id");
        expect(TokenKind::kComma, "','");
        placing.target_anchor = expect_id("anchor name");
        expect(TokenKind::kRParen, "')'");
      } else if (fname == "tol") {
        expect_word("pos");
        placing.pos_tol = expect_number("position tolerance");
        expect_word("rot");
        placing.rot_tol = deg_to_rad(expect_number("rotation tolerance"));
        expect_word("deg");
      } else if (fname == "dwell") {
        placing.dwell = expect_number("dwell");
      } else if (fname == "tool") {
        tool.tool = expect_id("tool part id");
      } else if (fname == "contact_time") {
        tool.contact_time = expect_number("contact time");
      } else if (fname == "action_id") {
        action.action_id = expect_id("action id");
      } else if (fname == "requires") {
        st.requirement = parse_or();
      } else if (fname == "min_time") {
        st.min_time = expect_number("min_time");
      } else if (fname == "par_time") {
        st.par_time = expect_number("par_time");
      } else if (fname == "instruction") {
        st.instruction = expect(TokenKind::kString, "string").text;
      } else if (fname == "hint") {
        st.hint = expect(TokenKind::kString, "string").text;
      }
      note_field(seen, f);
      map_.record(loc + "." + fname, span_from(value_start));
      expect(TokenKind::kSemicolon, "';'");
    }
    expect(TokenKind::kRBrace, "'}'");
    const std::string what = kind.text + " step '" + st.id + "'";
    require_fields(seen, {"par_time"}, id_tok.span, what);
    if (kind.text == "placing") {
      require_fields(seen, {"part", "target", "tol"}, id_tok.span, what);
      st.kind = placing;
    } else if (kind.text == "action") {
      require_fields(seen, {"action_id"}, id_tok.span, what);
      st.kind = action;
    } else {
      require_fields(seen, {"tool", "part", "contact_time"}, id_tok.span, what);
      st.kind = tool;
    }
    sc.steps.push_back(std::move(st));
  }

  Trigger parse_trigger() {
    const Token& k = expect(TokenKind::kIdent, "trigger");
    Trigger t;
    expect(TokenKind::kLParen, "'('");
    if (k.text == "completed" || k.text == "started") {
      t.kind = k.text == "completed" ? Trigger::Kind::kCompleted : Trigger::Kind::kStarted;
      t.subject = expect_id("step id");
    } else if (k.text == "entered") {
      t.kind = Trigger::Kind::kEntered;
      t.subject = expect_id("part id");
      expect(TokenKind::kComma, "','");
      t.region = expect_id("region id");
    } else if (k.text == "flag") {
      t.kind = Trigger::Kind::kFlagSet;
      t.subject = expect_id("flag name");
    } else if (k.text == "time") {
      t.kind = Trigger::Kind::kTimeElapsed;
      t.seconds = expect_number("seconds");
    } else {
      fail(k, "unknown trigger '" + k.text + "' (expected completed, started, entered, flag or time)");
    }
    expect(TokenKind::kRParen, "')'");
    return t;
  }

  EventAction parse_action() {
    const Token& k = expect(TokenKind::kIdent, "event action");
    EventAction a;
    expect(TokenKind::kLParen, "'('");
    if (k.text == "weld") {
      a.kind = EventAction::Kind::kWeld;
      a.target = expect_id("part id");
      expect(TokenKind::kComma, "','");
      a.parent = expect_id("parent part id");
      expect(TokenKind::kDot, "'.'");
      a.anchor = expect_id("anchor name");
    } else {
      if (k.text == "unweld") {
        a.kind = EventAction::Kind::kUnweld;
      } else if (k.text == "activate") {
        a.kind = EventAction::Kind::kActivate;
      } else if (k.text == "deactivate") {
        a.kind = EventAction::Kind::kDeactivate;
      } else if (k.text == "set_flag") {
        a.kind = EventAction::Kind::kSetFlag;
      } else if (k.text == "particles") {
        a.kind = EventAction::Kind::kParticles;
      } else {
        fail(k, "unknown event action '" + k.text + "'");
      }
      a.target = expect_id("identifier");
    }
    expect(TokenKind::kRParen, "')'");
    return a;
  }

  void parse_event(Scenario& sc) {
    advance();
    const Token& id_tok = expect(TokenKind::kIdent, "event id");
    EventDef ev;
    ev.id = id_tok.text;
    const std::string loc = "event:" + ev.id;
    map_.record(loc, id_tok.span);
    expect(TokenKind::kLBrace, "'{'");
    expect_word("when");
    expect(TokenKind::kEquals, "'='");
    std::size_t start = pos_;
    ev.trigger = parse_trigger();
    map_.record(loc + ".when", span_from(start));
    expect(TokenKind::kSemicolon, "';'");
    if (at_word("do")) {
      advance();
      expect(TokenKind::kEquals, "'='");
      start = pos_;
      ev.actions.push_back(parse_action());
      while (at(TokenKind::kComma)) {
        advance();
        ev.actions.push_back(parse_action());
      }
      map_.record(loc + ".do", span_from(start));
      expect(TokenKind::kSemicolon, "';'");
    }
    expect(TokenKind::kRBrace, "'}'");
    sc.events.push_back(std::move(ev));
  }

  void parse_region(Scenario& sc) {
    advance();
    const std::size_t start = pos_;
    Region r;
    r.id = expect_id("region id");
    expect(TokenKind::kEquals, "'='");
    expect_word("sphere");
    expect(TokenKind::kLParen, "'('");
    r.center = parse_vec3();
    expect(TokenKind::kComma, "','");
    r.radius = expect_number("radius");
    expect(TokenKind::kRParen, "')'");
    if (at_word("on")) {
      advance();
      r.parent = expect_id("part id");
    }
    map_.record("region:" + r.id, span_from(start));
    expect(TokenKind::kSemicolon, "';'");
    sc.regions.push_back(std::move(r));
  }

  void parse_difficulty(Scenario& sc) {
    advance();
    const Token& id_tok = expect(TokenKind::kIdent, "difficulty id");
    DifficultyLevel d;
    d.id = id_tok.text;
    map_.record("difficulty:" + d.id, id_tok.span);
    expect(TokenKind::kLBrace, "'{'");
    std::set<std::string> seen;
    while (!at(TokenKind::kRBrace)) {
      const Token& f = expect(TokenKind::kIdent, "difficulty field");
      expect(TokenKind::kEquals, "'='");
      if (f.text == "ghost") {
        d.ghost_enabled = expect_bool();
      } else if (f.text == "trajectory") {
        d.trajectory_enabled = expect_bool();
      } else if (f.text == "instructions") {
        d.instructions_enabled = expect_bool();
      } else if (f.text == "hint_penalty") {
        d.hint_penalty = expect_number("hint penalty");
      } else if (f.text == "par_time_scale") {
        d.par_time_scale = expect_number("par time scale");
      } else {
        fail(f, "unknown difficulty field '" + f.text + "'");
      }
      note_field(seen, f);
      expect(TokenKind::kSemicolon, "';'");
    }
    expect(TokenKind::kRBrace, "'}'");
    sc.difficulties.push_back(std::move(d));
  }

  void parse_material(Scenario& sc) {
    advance();
    const std::size_t start = pos_;
    MaterialPair m;
    m.a = expect_id("material name");
    m.b = expect_id("material name");
    expect(TokenKind::kEquals, "'='");
    m.mu = expect_number("friction coefficient");
    map_.record("material:" + m.a + ":" + m.b, span_from(start));
    expect(TokenKind::kSemicolon, "';'");
    sc.materials.push_back(std::move(m));
  }

  CableEnd parse_cable_end() {
    CableEnd e;
    e.part = expect_id("part id");
    expect(TokenKind::kDot, "'.'");
    e.anchor = expect_id("anchor name");
    return e;
  }

  void parse_cable(Scenario& sc) {
    advance();
    const Token& id_tok = expect(TokenKind::kIdent, "cable id");
    CableDef c;
    c.id = id_tok.text;
    const std::string loc = "cable:" + c.id;
    map_.record(loc, id_tok.span);
    expect(TokenKind::kLBrace, "'{'");
    std::set<std::string> seen;
    while (!at(TokenKind::kRBrace)) {
      const Token& f = expect(TokenKind::kIdent, "cable field");
      expect(TokenKind::kEquals, "'='");
      const std::size_t value_start = pos_;
      if (f.text == "from") {
        c.from = parse_cable_end();
      } else if (f.text == "to") {
        c.to = parse_cable_end();
      } else if (f.text == "length") {
        c.length = expect_number("length");
      } else if (f.text == "nodes") {
        const Token& n = expect(TokenKind::kNumber, "node count");
        if (n.number != std::floor(n.number) || n.number < 2 || n.number > 100000) {
          error("E_BAD_CABLE", n.span, "node count must be an integer in [2, 100000]");
        } else {
          c.nodes = static_cast<int>(n.number);
        }
      } else if (f.text == "node_mass") {
        c.node_mass = expect_number("node mass");
      } else if (f.text == "compliance") {
        c.compliance = expect_number("compliance");
      } else if (f.text == "damping") {
        c.damping = expect_number("damping");
      } else {
        fail(f, "unknown cable field '" + f.text + "'");
      }
      note_field(seen, f);
      map_.record(loc + "." + f.text, span_from(value_start));
      expect(TokenKind::kSemicolon, "';'");
    }
    expect(TokenKind::kRBrace, "'}'");
    require_fields(seen, {"from", "to", "length", "nodes"}, id_tok.span, "cable '" + c.id + "'");
    sc.cables.push_back(std::move(c));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  SourceMap& map_;
  std::vector<Diagnostic>& diags_;
};

}  // namespace

ParseResult parse(std::string_view text) {
  ParseResult r;
  r.source_map.set_fallback(SourceSpan{0, 1, 1, 0});
  auto tokens = tokenize(text, r.diagnostics);
  Parser p(std::move(tokens), r.source_map, r.diagnostics);
  std::optional<Scenario> sc = p.run();
  if (!sc) return r;
  if (has_errors(r.diagnostics)) return r;
  auto semantic = validate_scenario(*sc);
  attach_spans(semantic, r.source_map);
  const bool ok = !has_errors(semantic);
  for (auto& d : semantic) r.diagnostics.push_back(std::move(d));
  if (ok) r.scenario = std::move(sc);
  return r;
}

}  // namespace interact::lang
