#pragma once

#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include <json.hpp>

#include "analysis.hpp"
#include "constructions.hpp"
#include "injury.hpp"
#include "rs.hpp"

namespace omega_spectra {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Small helpers.

namespace detail {

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorKind::InputError, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::InputError, std::string("bad field '") + key + "': " + e.what());
  }
}

template <class T>
T field_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? field<T>(j, key) : fallback;
}

template <class K, class V>
json pairs(const std::map<K, V>& m) {
  json a = json::array();
  for (const auto& [k, v] : m) a.push_back({k, v});
  return a;
}

template <class K, class V>
std::map<K, V> unpairs(const json& a) {
  std::map<K, V> m;
  for (const auto& p : a) m[p.at(0).get<K>()] = p.at(1).get<V>();
  return m;
}

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> unopt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

inline void check_header(const json& j, const std::string& kind) {
  if (field<int>(j, "schema_version") != kSchemaVersion)
    fail(ErrorKind::InputError, "unsupported schema_version " + j.at("schema_version").dump());
  if (field<std::string>(j, "kind") != kind) fail(ErrorKind::InputError, "expected a '" + kind + "' document, got '" + j.at("kind").get<std::string>() + "'");
}

inline json header(const std::string& kind) { return {{"schema_version", kSchemaVersion}, {"kind", kind}}; }

}  // namespace detail

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InputError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::InputError, path + ": " + e.what());
  }
}

/// Two-space indentation, sorted keys, trailing newline: byte-stable for equal inputs.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InputError, "cannot write " + path);
  out << text;
}

// ---------------------------------------------------------------------------
// Functions and approximations.

inline json to_json(const FuncSpec& f) {
  json j;
  j["label"] = f.label();
  j["eval_bound"] = f.eval_bound();
  switch (f.kind()) {
    case FuncSpec::Kind::TablePrefix: j["type"] = "table", j["values"] = f.table_values(); break;
    case FuncSpec::Kind::Expression: j["type"] = "expression", j["text"] = f.expression_text(); break;
    case FuncSpec::Kind::Builtin:
      j["type"] = "builtin";
      j["name"] = builtin_name(*f.builtin_kind());
      if (*f.builtin_kind() == Builtin::Constant) j["constant"] = f.constant_value();
      break;
  }
  if (!f.overrides().empty()) j["overrides"] = detail::pairs(f.overrides());
  return j;
}

inline FuncSpec func_spec_from_json(const json& j) {
  const auto type = detail::field<std::string>(j, "type");
  const Nat bound = detail::field_or<Nat>(j, "eval_bound", FuncSpec::kDefaultBound);
  FuncSpec f = FuncSpec::builtin(Builtin::Identity);
  if (type == "table") {
    f = FuncSpec::table(detail::field<std::vector<Nat>>(j, "values"), detail::field_or<std::string>(j, "label", "table"));
  } else if (type == "expression") {
    f = FuncSpec::expression(detail::field<std::string>(j, "text"), bound);
  } else if (type == "builtin") {
    auto name = detail::field<std::string>(j, "name");
    f = name == "constant" ? FuncSpec::builtin(Builtin::Constant, detail::field<Nat>(j, "constant"), bound) : FuncSpec::builtin(name, bound);
  } else {
    fail(ErrorKind::InputError, "unknown function type '" + type + "'");
  }
  if (j.contains("overrides")) f = f.with_overrides(detail::unpairs<Nat, Nat>(j.at("overrides")));
  return f;
}

inline json to_json(const DeltaTwoApprox& X) {
  json a = json::array();
  for (const auto& [k, init] : X.initial_bits()) a.push_back({{"index", k}, {"initial", init}, {"flips", X.flips(k)}});
  return {{"indices", a}};
}

inline DeltaTwoApprox delta2_from_json(const json& j) {
  DeltaTwoApprox X;
  for (const auto& e : detail::field<json>(j, "indices"))
    X.declare(detail::field<Nat>(e, "index"), detail::field<bool>(e, "initial"), detail::field_or<std::vector<Nat>>(e, "flips", {}));
  return X;
}

/// Block function input: {"shapes": [[...]], "word": [...]} or a period repeated,
/// or runs d b^m e for m = 1..runs.
inline FuncSpec block_function_from_json(const json& j) {
  auto shapes = detail::field<std::vector<std::vector<Nat>>>(j, "shapes");
  std::vector<std::size_t> word;
  if (j.contains("word")) {
    word = detail::field<std::vector<std::size_t>>(j, "word");
  } else if (j.contains("period")) {
    auto period = detail::field<std::vector<std::size_t>>(j, "period");
    auto times = detail::field<std::size_t>(j, "repeat");
    for (std::size_t i = 0; i < times; ++i) word.insert(word.end(), period.begin(), period.end());
  } else if (j.contains("runs")) {
    const auto& r = j.at("runs");
    auto d = detail::field<std::size_t>(r, "d"), b = detail::field<std::size_t>(r, "b"), e = detail::field<std::size_t>(r, "e");
    for (std::size_t m = 1, n = detail::field<std::size_t>(r, "count"); m <= n; ++m) {
      word.push_back(d);
      word.insert(word.end(), m, b);
      word.push_back(e);
    }
  } else {
    fail(ErrorKind::InputError, "block function needs 'word', 'period' or 'runs'");
  }
  for (std::size_t t : word)
    if (t >= shapes.size()) fail(ErrorKind::InputError, "word uses undeclared type " + std::to_string(t));
  return block_function(shapes, word, detail::field_or<std::string>(j, "label", "block-word"));
}

// ---------------------------------------------------------------------------
// Analysis reports (write-only).

inline json to_json(const CaseWitness& w) {
  json j{{"case", to_string(w.kind)}, {"window", w.window}, {"recurrent", w.recurrent}};
  switch (w.kind) {
    case CaseWitness::Case::A: j["sigma"] = w.sigma, j["tau"] = w.tau, j["h"] = w.h; break;
    case CaseWitness::Case::B: j["k"] = w.k, j["k_late_count"] = w.k_late_count; break;
    case CaseWitness::Case::C: {
      j["b"] = w.b, j["d"] = w.d, j["e"] = w.e;
      json occ = json::array();
      for (const auto& o : w.occurrences) occ.push_back({o.pos, o.m});
      j["occurrences"] = occ;
      break;
    }
  }
  return j;
}

inline json to_json(const FuncSpec& f, const Classification& c, std::size_t max_listed = 64) {
  json j = detail::header("analysis");
  j["function"] = to_json(f);
  j["verdict"] = to_string(c.verdict);
  j["bound"] = c.bound;
  j["note"] = c.note;
  if (c.trivial) j["trivial"] = to_string(*c.trivial);
  j["last_exception"] = detail::opt(c.last_exception);
  if (c.trivial == TrivialKind::AlmostConstant) j["constant"] = c.constant;
  if (c.verdict == Verdict::NonQuasiBlockWitnessed) {
    j["window_start"] = c.window_start;
    j["witness_count"] = c.witnesses.size();
    json w = json::array();
    for (std::size_t i = 0; i < c.witnesses.size() && i < max_listed; ++i) w.push_back({c.witnesses[i].first, c.witnesses[i].second});
    j["witnesses"] = w;
  }
  if (c.table) {
    const auto& t = *c.table;
    j["blocks"] = t.alpha.size();
    j["types_seen"] = t.types.size();
    json types = json::array();
    for (std::size_t i = 0; i < t.types.size() && i < max_listed; ++i) types.push_back(t.types[i]);
    j["types"] = types;
    std::vector<std::size_t> head(t.alpha.begin(), t.alpha.begin() + std::min(t.alpha.size(), max_listed));
    j["alpha_head"] = head;
    j["new_type_blocks"] = std::vector<std::size_t>(c.new_type_blocks.begin(), c.new_type_blocks.begin() + std::min(c.new_type_blocks.size(), max_listed));
  }
  if (c.case_witness) j["case_witness"] = to_json(*c.case_witness);
  if (!c.minorant.empty()) j["minorant"] = c.minorant;
  if (c.last_cut) j["last_cut"] = *c.last_cut;
  return j;
}

// ---------------------------------------------------------------------------
// Δ₂ construction traces.

inline Variant variant_from_string(const std::string& s) {
  for (auto v : {Variant::FiniteRange, Variant::BlockA, Variant::BlockB, Variant::BlockC})
    if (s == to_string(v)) return v;
  fail(ErrorKind::InputError, "unknown variant '" + s + "'");
}

inline EventKind event_kind_from_string(const std::string& s) {
  for (auto k : {EventKind::RequirementInitialized, EventKind::AttentionReceived, EventKind::PtrApplied, EventKind::CompanionAssigned, EventKind::ValueCommitted})
    if (s == to_string(k)) return k;
  fail(ErrorKind::InputError, "unknown event kind '" + s + "'");
}

inline json to_json(const ConstructionTrace& t) {
  json j = detail::header("construction");
  j["variant"] = to_string(t.variant);
  j["function"] = to_json(t.spec);
  j["window"] = t.window;
  j["stages"] = t.stages;
  j["prefix"] = t.prefix;
  const auto& p = t.params;
  j["params"] = {{"c0", p.c0}, {"c1", p.c1}, {"sigma", p.sigma}, {"tau", p.tau}, {"diff", p.diff}, {"k", p.k}, {"b", p.b}, {"d", p.d}, {"e", p.e}};
  j["X"] = to_json(t.X);
  j["final_order"] = t.final_order;
  std::vector<Nat> entry;
  for (Nat x : t.final_order) entry.push_back(t.entry_stage.at(x));
  j["entry_stage"] = entry;
  json ev = json::array();
  for (const auto& e : t.events) {
    json o{{"kind", to_string(e.kind)}, {"stage", e.stage}, {"e", e.e}, {"bit", e.bit}};
    if (!e.target.empty()) o["target"] = e.target;
    if (e.b || e.c || e.d || e.fillers) o["split"] = {e.b, e.c, e.d, e.fillers};
    if (e.exponent) o["exponent"] = *e.exponent;
    if (!e.elements.empty()) o["elements"] = e.elements;
    if (e.value) o["value"] = *e.value;
    ev.push_back(o);
  }
  j["events"] = ev;
  json comp = json::array();
  for (const auto& [x, c] : t.companions) comp.push_back({{"anchor", x}, {"companions", c.companions}, {"boundary", c.boundary}, {"exponents", c.exponents}});
  j["companions"] = comp;
  return j;
}

/// Unit string of a construction, rebuilt from its function and window.
inline UnitString construction_source(const ConstructionTrace& t) {
  if (t.variant == Variant::FiniteRange) return UnitString::points(t.spec.tabulate(t.window));
  return UnitString::blocks(alpha_within(t.spec, t.window));
}

inline ConstructionTrace construction_trace_from_json(const json& j) {
  detail::check_header(j, "construction");
  ConstructionTrace t;
  t.variant = variant_from_string(detail::field<std::string>(j, "variant"));
  t.spec = func_spec_from_json(detail::field<json>(j, "function"));
  t.window = detail::field<Nat>(j, "window");
  t.stages = detail::field<Nat>(j, "stages");
  t.prefix = detail::field<Nat>(j, "prefix");
  const auto& p = j.at("params");
  t.params.c0 = p.at("c0");
  t.params.c1 = p.at("c1");
  t.params.sigma = p.at("sigma").get<std::vector<std::size_t>>();
  t.params.tau = p.at("tau").get<std::vector<std::size_t>>();
  t.params.diff = p.at("diff");
  t.params.k = p.at("k");
  t.params.b = p.at("b");
  t.params.d = p.at("d");
  t.params.e = p.at("e");
  t.X = delta2_from_json(detail::field<json>(j, "X"));
  t.final_order = detail::field<std::vector<Nat>>(j, "final_order");
  auto entry = detail::field<std::vector<Nat>>(j, "entry_stage");
  if (entry.size() != t.final_order.size()) fail(ErrorKind::InputError, "entry_stage and final_order differ in length");
  for (std::size_t i = 0; i < entry.size(); ++i) t.entry_stage[t.final_order[i]] = entry[i];
  for (const auto& o : detail::field<json>(j, "events")) {
    Event e;
    e.kind = event_kind_from_string(o.at("kind"));
    e.stage = o.at("stage");
    e.e = o.at("e");
    e.bit = o.at("bit");
    e.target = detail::field_or<std::string>(o, "target", "");
    if (o.contains("split")) {
      auto sp = o.at("split").get<std::array<std::size_t, 4>>();
      e.b = sp[0], e.c = sp[1], e.d = sp[2], e.fillers = sp[3];
    }
    e.exponent = detail::unopt<std::size_t>(o, "exponent");
    e.elements = detail::field_or<std::vector<Nat>>(o, "elements", {});
    e.value = detail::unopt<Nat>(o, "value");
    t.events.push_back(std::move(e));
  }
  for (const auto& o : detail::field<json>(j, "companions")) {
    CompanionEntry c;
    c.companions = o.at("companions").get<std::vector<Nat>>();
    c.boundary = o.at("boundary").get<std::vector<Nat>>();
    c.exponents = o.at("exponents").get<std::vector<std::size_t>>();
    t.companions[o.at("anchor").get<Nat>()] = std::move(c);
  }
  t.source = construction_source(t);
  return t;
}

// ---------------------------------------------------------------------------
// Michal builder output.

inline json to_json(const GSequence& g, Nat N, const MichalFunction& m) {
  json j = detail::header("michal");
  j["g"] = {{"values", g.values}, {"complete", g.complete}};
  j["N"] = N;
  j["values"] = m.values;
  std::vector<Nat> fillers;
  for (std::size_t k = 0; k < m.filler.size(); ++k)
    if (m.filler[k]) fillers.push_back(k);
  j["fillers"] = fillers;
  j["consumed"] = m.consumed;
  return j;
}

inline GSequence gsequence_from_json(const json& j) {
  return GSequence{detail::field<std::vector<Nat>>(j, "values"), detail::field_or<bool>(j, "complete", false)};
}

struct MichalDocument {
  GSequence g;
  Nat N = 0;
  MichalFunction m;
};

inline MichalDocument michal_from_json(const json& j) {
  detail::check_header(j, "michal");
  MichalDocument d;
  d.g = gsequence_from_json(detail::field<json>(j, "g"));
  d.N = detail::field<Nat>(j, "N");
  d.m.values = detail::field<std::vector<Nat>>(j, "values");
  d.m.filler.assign(d.m.values.size(), false);
  for (Nat k : detail::field<std::vector<Nat>>(j, "fillers")) {
    if (k >= d.m.filler.size()) fail(ErrorKind::InputError, "filler index out of range");
    d.m.filler[k] = true;
  }
  d.m.consumed = detail::field<std::size_t>(j, "consumed");
  if (!d.m.values.empty()) d.m.f = FuncSpec::table(d.m.values, "michal");
  return d;
}

// ---------------------------------------------------------------------------
// Injury families and traces.

inline ReqId req_from_label(const std::string& s) {
  static const std::regex ij(R"(([IJ])(\d+))"), r(R"(R<(\d+),(\d+),(\d+)>)");
  std::smatch m;
  if (std::regex_match(s, m, ij)) return m[1] == "I" ? ReqId::I(std::stoull(m[2])) : ReqId::J(std::stoull(m[2]));
  if (std::regex_match(s, m, r)) return ReqId::R(std::stoull(m[1]), std::stoull(m[2]), std::stoull(m[3]));
  fail(ErrorKind::InputError, "bad requirement label '" + s + "' (expected I<e>, J<e> or R<e1,e2,n>)");
}

inline json to_json(const ProgramFamily& fam) {
  json progs = json::array();
  for (const auto& [e, p] : fam.programs) {
    json rules = json::array();
    for (const auto& r : p.rules) {
      json q = json::array();
      for (auto [x, b] : r.queries) q.push_back({x, b});
      rules.push_back({{"input", detail::opt(r.input)}, {"queries", q}, {"output", r.output}, {"steps", r.steps}});
    }
    progs.push_back({{"index", e}, {"rules", rules}});
  }
  json en = json::array();
  for (const auto& [n, w] : fam.enums) {
    json items = json::array();
    for (auto [x, s] : w.items) items.push_back({x, s});
    en.push_back({{"index", n}, {"items", items}});
  }
  return {{"programs", progs}, {"enumerations", en}};
}

inline ProgramFamily family_from_json(const json& j) {
  ProgramFamily fam;
  for (const auto& p : detail::field_or<json>(j, "programs", json::array())) {
    OracleProgram prog;
    prog.index = detail::field<Nat>(p, "index");
    for (const auto& r : detail::field<json>(p, "rules")) {
      Rule rule;
      rule.input = detail::unopt<Nat>(r, "input");
      for (const auto& q : detail::field_or<json>(r, "queries", json::array())) rule.queries.emplace_back(q.at(0).get<Nat>(), q.at(1).get<bool>());
      rule.output = detail::field<Nat>(r, "output");
      rule.steps = detail::field_or<Nat>(r, "steps", 0);
      prog.rules.push_back(std::move(rule));
    }
    if (!fam.programs.emplace(prog.index, prog).second) fail(ErrorKind::InputError, "program " + std::to_string(prog.index) + " declared twice");
  }
  for (const auto& w : detail::field_or<json>(j, "enumerations", json::array())) {
    Enumeration e;
    e.index = detail::field<Nat>(w, "index");
    for (const auto& it : detail::field<json>(w, "items")) e.items.emplace_back(it.at(0).get<Nat>(), it.at(1).get<Nat>());
    if (!fam.enums.emplace(e.index, e).second) fail(ErrorKind::InputError, "enumeration " + std::to_string(e.index) + " declared twice");
  }
  return fam;
}

/// A family file: priority list, programs, enumerations and optional engine limits.
inline InjuryConfig injury_config_from_json(const json& j, Nat stages) {
  InjuryConfig c;
  c.stages = stages;
  for (const auto& l : detail::field_or<std::vector<std::string>>(j, "priority", {})) c.priority.push_back(req_from_label(l));
  c.family = family_from_json(j);
  auto mode = detail::field_or<std::string>(j, "mode", "faithful");
  if (mode != "faithful" && mode != "rank") fail(ErrorKind::InputError, "mode must be 'faithful' or 'rank'");
  c.mode = mode == "rank" ? TicketMode::Rank : TicketMode::Faithful;
  c.max_exponent = detail::field_or<Nat>(j, "max_exponent", c.max_exponent);
  c.max_elements = detail::field_or<Nat>(j, "max_elements", c.max_elements);
  return c;
}

inline json to_json(const InjuryConfig& c) {
  json j = to_json(c.family);
  std::vector<std::string> pri;
  for (const auto& r : c.priority) pri.push_back(r.label());
  j["priority"] = pri;
  j["stages"] = c.stages;
  j["mode"] = to_string(c.mode);
  j["max_exponent"] = c.max_exponent;
  j["max_elements"] = c.max_elements;
  return j;
}

inline json to_json(const InjuryTrace& t) {
  json j = detail::header("injury");
  j["config"] = to_json(t.config);
  j["final_order"] = t.final_order;
  std::vector<Nat> entry;
  for (Nat x : t.final_order) entry.push_back(t.entry_stage.at(x));
  j["entry_stage"] = entry;
  j["reservation_of"] = detail::pairs(t.reservation_of);
  json lay = json::array();
  for (const auto& l : t.layouts) lay.push_back({{"stage", l.stage}, {"blocks", l.blocks}});
  j["layouts"] = lay;
  j["exponent"] = detail::pairs(t.exponent);
  j["I"] = detail::pairs(t.I_entries);
  j["J"] = detail::pairs(t.J_entries);
  json res = json::array();
  for (const auto& r : t.reservations)
    res.push_back({{"req", r.req.label()}, {"stage", r.stage}, {"u", r.u}, {"v", r.v}, {"pair", r.pair}, {"tickets", r.tickets},
                   {"attention_stages", r.attention_stages}, {"witnesses", r.witnesses}, {"cancelled_at", detail::opt(r.cancelled_at)}, {"region", r.region}});
  j["reservations"] = res;
  json wit = json::array();
  for (const auto& w : t.witnesses) {
    json use = json::array();
    for (auto [q, b] : w.use) use.push_back({q, b});
    wit.push_back({{"req", w.req.label()}, {"stage", w.stage}, {"x", w.x}, {"acted_at", detail::opt(w.acted_at)}, {"use", use}, {"cancelled_at", detail::opt(w.cancelled_at)}});
  }
  j["witnesses"] = wit;
  json inc = json::array();
  for (const auto& i : t.increments) inc.push_back({{"n", i.n}, {"k", i.k}, {"stage", i.stage}, {"amount", i.amount}});
  j["increments"] = inc;
  json ev = json::array();
  for (const auto& e : t.events) ev.push_back({{"stage", e.stage}, {"kind", e.kind}, {"req", e.req}, {"detail", e.detail}});
  j["events"] = ev;
  return j;
}

inline InjuryTrace injury_trace_from_json(const json& j) {
  detail::check_header(j, "injury");
  InjuryTrace t;
  const auto& cj = detail::field<json>(j, "config");
  t.config = injury_config_from_json(cj, detail::field<Nat>(cj, "stages"));
  t.final_order = detail::field<std::vector<Nat>>(j, "final_order");
  auto entry = detail::field<std::vector<Nat>>(j, "entry_stage");
  if (entry.size() != t.final_order.size()) fail(ErrorKind::InputError, "entry_stage and final_order differ in length");
  for (std::size_t i = 0; i < entry.size(); ++i) t.entry_stage[t.final_order[i]] = entry[i];
  t.reservation_of = detail::unpairs<Nat, std::size_t>(j.at("reservation_of"));
  for (const auto& l : detail::field<json>(j, "layouts")) t.layouts.push_back({l.at("stage"), l.at("blocks").get<std::vector<Nat>>()});
  t.exponent = detail::unpairs<Nat, Nat>(j.at("exponent"));
  t.I_entries = detail::unpairs<Nat, Nat>(j.at("I"));
  t.J_entries = detail::unpairs<Nat, Nat>(j.at("J"));
  for (const auto& r : detail::field<json>(j, "reservations")) {
    ReservationRecord rec;
    rec.req = req_from_label(r.at("req"));
    rec.stage = r.at("stage");
    rec.u = r.at("u");
    rec.v = r.at("v");
    rec.pair = r.at("pair");
    rec.tickets = r.at("tickets").get<std::array<Nat, 3>>();
    rec.attention_stages = r.at("attention_stages").get<std::vector<Nat>>();
    rec.witnesses = r.at("witnesses").get<std::vector<Nat>>();
    rec.cancelled_at = detail::unopt<Nat>(r, "cancelled_at");
    rec.region = r.at("region").get<std::vector<Nat>>();
    t.reservations.push_back(std::move(rec));
  }
  for (const auto& w : detail::field<json>(j, "witnesses")) {
    WitnessRecord rec;
    rec.req = req_from_label(w.at("req"));
    rec.stage = w.at("stage");
    rec.x = w.at("x");
    rec.acted_at = detail::unopt<Nat>(w, "acted_at");
    for (const auto& q : w.at("use")) rec.use.emplace_back(q.at(0).get<Nat>(), q.at(1).get<bool>());
    rec.cancelled_at = detail::unopt<Nat>(w, "cancelled_at");
    t.witnesses.push_back(std::move(rec));
  }
  for (const auto& i : detail::field<json>(j, "increments")) t.increments.push_back({i.at("n"), i.at("k"), i.at("stage"), i.at("amount")});
  for (const auto& e : detail::field<json>(j, "events")) t.events.push_back({e.at("stage"), e.at("kind"), e.at("req"), e.at("detail")});
  return t;
}

// ---------------------------------------------------------------------------
// Retrieval runs (write-only).

inline json to_json(const RsResult& r, const Schedule& sch, std::size_t copy_size, std::optional<bool> verified) {
  json j = detail::header("rs");
  j["instance"] = r.instance;
  j["schedule"] = {{"policy", to_string(sch.policy)}, {"delay", sch.delay}, {"seed", sch.seed}, {"descent_limit", sch.descent_limit}};
  j["copy_size"] = copy_size;
  j["segment"] = r.segment;
  j["successor"] = detail::pairs(r.successor);
  json rounds = json::array();
  for (const auto& x : r.rounds) rounds.push_back({{"n", x.n}, {"branch", x.branch}});
  j["rounds"] = rounds;
  j["comparator_queries"] = r.comparator_queries;
  j["oracle_queries"] = r.oracle_queries;
  j["verified"] = detail::opt(verified);
  return j;
}

}  // namespace omega_spectra
