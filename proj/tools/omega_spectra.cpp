// omega-spectra: analyses, constructions and audits on computable copies of (ω,<).

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "omega_spectra/dot.hpp"
#include "omega_spectra/json_io.hpp"

namespace os = omega_spectra;
using os::json;
using os::Nat;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitAudit = 2;
constexpr int kExitInput = 3;

struct AuditFailed {
  std::vector<std::string> failures;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("omega-spectra");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* lv = std::getenv("OMEGA_SPECTRA_LOG")) {
    std::string s = lv;
    if (s == "error") spdlog::set_level(spdlog::level::err);
    else if (s == "debug") spdlog::set_level(spdlog::level::debug);
    else if (s != "info") spdlog::warn("OMEGA_SPECTRA_LOG='{}' not one of error, info, debug; using info", s);
  }
}

/// Where a function comes from: exactly one of the four options.
struct FunctionArgs {
  std::string builtin, expr, table, blocks;
  Nat eval_bound = os::FuncSpec::kDefaultBound;

  void add(CLI::App* app) {
    auto* g = app->add_option_group("function", "the function f");
    g->add_option("--builtin", builtin, "euler-phi | divisor-count | double-half | involution-g | identity | \"constant N\"");
    g->add_option("--expr", expr, "arithmetic expression in n, e.g. \"n % 2\"");
    g->add_option("--table", table, "JSON file: array of values f(0), f(1), ...");
    g->add_option("--blocks", blocks, "JSON file: block shapes and a word over them");
    g->require_option(0, 1);
    app->add_option("--eval-bound", eval_bound, "largest argument builtins and expressions may be evaluated at")->check(CLI::PositiveNumber);
  }

  bool given() const { return !builtin.empty() || !expr.empty() || !table.empty() || !blocks.empty(); }

  os::FuncSpec spec() const {
    if (!builtin.empty()) return os::FuncSpec::builtin(builtin, eval_bound);
    if (!expr.empty()) return os::FuncSpec::expression(expr, eval_bound);
    if (!table.empty()) {
      auto j = os::read_json_file(table);
      if (j.is_array()) return os::FuncSpec::table(j.get<std::vector<Nat>>(), table);
      return os::func_spec_from_json(j);
    }
    if (!blocks.empty()) return os::block_function_from_json(os::read_json_file(blocks));
    os::fail(os::ErrorKind::InputError, "no function given (use --builtin, --expr, --table or --blocks)");
  }
};

void emit(const std::string& path, const json& j) {
  if (path.empty() || path == "-") {
    std::cout << os::dump(j);
  } else {
    os::write_text_file(path, os::dump(j));
    spdlog::info("wrote {}", path);
  }
}

void emit_dot(const std::string& path, const os::FinitePresentation& p, std::size_t limit) {
  if (path.empty()) return;
  os::write_text_file(path, os::to_dot(p, {"A", limit}));
  spdlog::info("wrote {} ({} elements{})", path, p.size(), p.size() > limit ? ", truncated" : "");
}

void require_ok(std::vector<std::string> failures) {
  if (!failures.empty()) throw AuditFailed{std::move(failures)};
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
  FunctionArgs fn;
  Nat bound = 0;
  std::string out;
};

int run_analyze(const AnalyzeArgs& a) {
  auto f = a.fn.spec();
  if (a.bound > f.eval_bound()) f = f.with_eval_bound(a.bound);
  auto c = os::classify(f, a.bound);
  spdlog::info("{}: {} (up to {}){}", f.label(), os::to_string(c.verdict), a.bound, c.note.empty() ? "" : " - " + c.note);
  if (c.trivial) spdlog::info("  {}", os::to_string(*c.trivial));
  if (!c.minorant.empty()) spdlog::info("  minorant {}", c.minorant);
  if (c.case_witness) spdlog::info("  case {}", os::to_string(c.case_witness->kind));
  if (!os::verify_evidence(f, c)) throw AuditFailed{{"classification evidence does not re-verify"}};
  emit(a.out, os::to_json(f, c));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// construct

struct ConstructArgs {
  FunctionArgs fn;
  std::string X, g, family, out, dot;
  Nat stages = 0, window = 20000, N = 0, case_window = 400;
  std::size_t dot_limit = 2000;
};

int run_delta2(const std::string& variant, const ConstructArgs& a) {
  auto f = a.fn.spec();
  auto X = os::delta2_from_json(os::read_json_file(a.X));
  const Nat window = std::min(a.window, f.eval_bound());
  os::ConstructionTrace t;
  if (variant == "finite-range") {
    t = os::construct_finite_range(f, X, a.stages, window);
  } else {
    auto table = os::alpha_within(f, window);
    if (variant == "block-c") {
      auto w = os::find_c_witness(table.alpha, table.alpha.size());
      if (!w) os::fail(os::ErrorKind::WitnessMissing, "no d b^m e pattern with growing m in the window");
      t = os::construct_block_case_c(f, *w, X, a.stages, window);
    } else {
      auto w = os::find_case(table.alpha, std::min<std::size_t>(a.case_window, table.alpha.size()));
      auto want = variant == "block-a" ? os::CaseWitness::Case::A : os::CaseWitness::Case::B;
      if (w.kind != want) os::fail(os::ErrorKind::InputError, std::string("case search found case ") + os::to_string(w.kind) + ", not the requested one");
      t = want == os::CaseWitness::Case::A ? os::construct_block_case_a(f, w, X, a.stages, window) : os::construct_block_case_b(f, w, X, a.stages, window);
    }
  }
  auto audit = os::audit_construction(t);
  spdlog::info("{}: {} stages, {} elements, {} ptr applications", variant, t.stages, t.final_order.size(), audit.ptr_applications);
  require_ok(audit.failures);
  emit(a.out, os::to_json(t));
  emit_dot(a.dot, t.presentation_at(t.stages), a.dot_limit);
  return kExitOk;
}

int run_michal(const ConstructArgs& a) {
  auto g = os::gsequence_from_json(os::read_json_file(a.g));
  auto m = os::michal_build(g, a.N);
  require_ok(os::audit_michal(m, g));
  spdlog::info("michal: N = {}, {} entries of g consumed", a.N, m.consumed);
  emit(a.out, os::to_json(g, a.N, m));
  emit_dot(a.dot, os::FinitePresentation::induced([&] {
    std::vector<Nat> els(m.values.size());
    std::iota(els.begin(), els.end(), Nat{0});
    return els;
  }(), m.values), a.dot_limit);
  return kExitOk;
}

int run_unusual(const ConstructArgs& a) {
  auto cfg = os::injury_config_from_json(a.family.empty() ? json::object() : os::read_json_file(a.family), a.stages);
  auto t = os::run_injury(cfg);
  auto audit = os::audit_injury(t);
  auto counting = os::audit_counting(t);
  spdlog::info("unusual: {} stages, {} elements, {} reservations, {} increments", a.stages, t.final_order.size(), t.reservations.size(), counting.increments.size());
  audit.failures.insert(audit.failures.end(), counting.failures.begin(), counting.failures.end());
  require_ok(audit.failures);
  emit(a.out, os::to_json(t));
  emit_dot(a.dot, t.presentation_at(a.stages), a.dot_limit);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// rs

struct RsArgs {
  FunctionArgs fn;
  std::string instance, minorant, policy = "random-finite-delay", g, out;
  Nat delay = 12, seed = 1, descent_limit = 256, size = 500, rounds = 10, check_bound = 200000, init = 0;
  bool verify = false;
};

int run_rs(const RsArgs& a) {
  os::Schedule sch;
  sch.policy = os::insertion_policy_from_string(a.policy);
  sch.delay = a.delay;
  sch.seed = a.seed;
  sch.descent_limit = a.descent_limit;

  os::FuncSpec f = os::FuncSpec::builtin(os::Builtin::Identity);
  os::RsCondition cond;
  if (a.instance == "non-quasi-block") {
    f = a.fn.spec();
    cond = os::cond_non_quasi_block();
  } else if (a.instance == "bound") {
    f = a.fn.spec();
    std::string L = !a.minorant.empty() ? a.minorant : f.declared_minorant().value_or("");
    if (L.empty()) os::fail(os::ErrorKind::InputError, "bound instance needs --minorant");
    cond = os::cond_bound(f, os::FuncSpec::expression(L), a.check_bound);
  } else if (a.instance == "involution") {
    f = a.fn.given() ? a.fn.spec() : os::FuncSpec::builtin(os::Builtin::InvolutionG);
    cond = os::cond_involution();
  } else if (a.instance == "michal") {
    if (a.g.empty()) os::fail(os::ErrorKind::InputError, "michal instance needs --g");
    f = os::michal_build(os::gsequence_from_json(os::read_json_file(a.g)), a.size).f;
    cond = os::cond_michal(a.size - 1);
  } else {
    os::fail(os::ErrorKind::InputError, "unknown instance '" + a.instance + "'");
  }

  auto gen = os::adversarial_copy(sch, a.size);
  auto fA = os::image_oracle(f, gen.log);
  std::vector<Nat> init;
  if (a.init > 0) {
    for (Nat r = 0; r < a.init; ++r) init.push_back(gen.log.element_at(r));
  } else {
    init = os::advice_initial_segment(gen.log, gen.copy, fA, f, cond, 64);
  }
  const std::size_t touched = gen.log.accesses();
  auto r = os::rs_run(gen.copy, fA, f, cond, init, a.rounds);
  std::optional<bool> verified;
  std::vector<std::string> failures;
  if (gen.log.accesses() != touched) failures.push_back("rs_run read the sealed log");
  if (a.verify) {
    auto bad = os::verify_against_log(r, gen.log);
    failures.insert(failures.end(), bad.begin(), bad.end());
    verified = failures.empty();
  }
  spdlog::info("rs {}: {} rounds, segment of {} elements, {} comparator and {} oracle queries", r.instance, r.rounds.size(), r.segment.size(),
               r.comparator_queries, r.oracle_queries);
  emit(a.out, os::to_json(r, sch, a.size, verified));
  require_ok(failures);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// audit

int run_audit(const std::string& path) {
  auto j = os::read_json_file(path);
  const auto kind = j.value("kind", std::string{});
  if (kind == "construction") {
    auto t = os::construction_trace_from_json(j);
    auto a = os::audit_construction(t);
    require_ok(a.failures);
    spdlog::info("{}: construction trace ({}) passes, {} ptr applications", path, os::to_string(t.variant), a.ptr_applications);
  } else if (kind == "injury") {
    auto t = os::injury_trace_from_json(j);
    auto a = os::audit_injury(t);
    auto c = os::audit_counting(t);
    a.failures.insert(a.failures.end(), c.failures.begin(), c.failures.end());
    require_ok(a.failures);
    spdlog::info("{}: injury trace passes, {} increments", path, c.increments.size());
  } else if (kind == "michal") {
    auto d = os::michal_from_json(j);
    auto rebuilt = os::michal_build(d.g, d.N);
    auto failures = os::audit_michal(d.m, d.g);
    if (rebuilt.values != d.m.values || rebuilt.filler != d.m.filler) failures.push_back("stored table differs from a rebuild");
    require_ok(failures);
    spdlog::info("{}: michal table passes", path);
  } else {
    os::fail(os::ErrorKind::InputError, path + ": cannot audit a document of kind '" + kind + "'");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"omega-spectra: degree-spectrum constructions on computable copies of (omega,<)"};
  app.require_subcommand(1);

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "classify a function and print a JSON report");
  an.fn.add(analyze);
  analyze->add_option("--bound", an.bound, "scan window")->required()->check(CLI::PositiveNumber);
  analyze->add_option("--out", an.out, "report path (default stdout)");

  ConstructArgs ca;
  auto* construct = app.add_subcommand("construct", "run a construction, audit it, write the trace");
  construct->require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", ca.out, "trace path (default stdout)");
    sub->add_option("--dot", ca.dot, "write the final presentation as DOT");
    sub->add_option("--dot-limit", ca.dot_limit, "at most this many elements in the DOT output")->check(CLI::PositiveNumber);
  };
  std::string variant;
  for (const char* v : {"finite-range", "block-a", "block-b", "block-c"}) {
    auto* sub = construct->add_subcommand(v, std::string("Δ₂ construction, ") + v);
    ca.fn.add(sub);
    sub->add_option("--X", ca.X, "Δ₂ approximation (JSON flip table)")->required();
    sub->add_option("--stages", ca.stages, "number of stages")->required()->check(CLI::PositiveNumber);
    sub->add_option("--window", ca.window, "f is tabulated on [0, window]")->check(CLI::PositiveNumber);
    if (std::string(v) != "finite-range" && std::string(v) != "block-c")
      sub->add_option("--case-window", ca.case_window, "blocks examined by the case search")->check(CLI::PositiveNumber);
    add_common(sub);
    sub->callback([&variant, v] { variant = v; });
  }
  auto* michal = construct->add_subcommand("michal", "quasi-block function from a sequence g");
  michal->add_option("--g", ca.g, "JSON {\"values\": [...], \"complete\": bool}")->required();
  michal->add_option("--N", ca.N, "table length")->required()->check(CLI::PositiveNumber);
  add_common(michal);
  michal->callback([&variant] { variant = "michal"; });
  auto* unusual = construct->add_subcommand("unusual", "finite-injury construction");
  unusual->add_option("--stages", ca.stages, "number of stages")->required()->check(CLI::PositiveNumber);
  unusual->add_option("--family", ca.family, "requirements, programs and enumerations (JSON); empty family if omitted");
  add_common(unusual);
  unusual->callback([&variant] { variant = "unusual"; });

  RsArgs ra;
  auto* rs = app.add_subcommand("rs", "retrieve an initial segment of an adversarial copy relative to f_A");
  ra.fn.add(rs);
  rs->add_option("--instance", ra.instance, "non-quasi-block | bound | involution | michal")->required();
  rs->add_option("--minorant", ra.minorant, "bound instance: minorant expression");
  rs->add_option("--check-bound", ra.check_bound, "bound instance: range on which the minorant is verified");
  rs->add_option("--g", ra.g, "michal instance: JSON g sequence");
  rs->add_option("--policy", ra.policy, "identity | delay-evens | random-finite-delay | insert-at-front");
  rs->add_option("--delay", ra.delay, "insertion delay");
  rs->add_option("--seed", ra.seed, "schedule seed");
  rs->add_option("--descent-limit", ra.descent_limit, "max later insertions in front of one element");
  rs->add_option("--size", ra.size, "elements in the copy")->check(CLI::PositiveNumber);
  rs->add_option("--rounds", ra.rounds, "extension rounds");
  rs->add_option("--init", ra.init, "initial segment length (default: shortest on which the condition holds)");
  rs->add_flag("--verify", ra.verify, "cross-check the successor table against the generation log");
  rs->add_option("--out", ra.out, "result path (default stdout)");

  std::string audit_path;
  auto* audit = app.add_subcommand("audit", "re-load a trace and re-run its audit");
  audit->add_option("trace", audit_path, "trace JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*analyze) return run_analyze(an);
    if (*construct) {
      if (variant == "michal") return run_michal(ca);
      if (variant == "unusual") return run_unusual(ca);
      return run_delta2(variant, ca);
    }
    if (*rs) return run_rs(ra);
    if (*audit) return run_audit(audit_path);
  } catch (const AuditFailed& a) {
    spdlog::error("audit failed ({} problems)", a.failures.size());
    for (std::size_t i = 0; i < a.failures.size() && i < 20; ++i) spdlog::error("  {}", a.failures[i]);
    return kExitAudit;
  } catch (const os::Error& e) {
    spdlog::error("{}", e.what());
    return e.kind() == os::ErrorKind::InputError ? kExitInput : kExitRuntime;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitRuntime;
  }
  return kExitInput;
}
