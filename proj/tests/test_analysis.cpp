#include <catch_amalgamated.hpp>

#include <numeric>

#include "omega_spectra/analysis.hpp"

using namespace omega_spectra;

namespace {

// Blocks tiling [0, ...) found by growing an interval until nothing maps in or out,
// with f evaluated directly on [0, bound].
std::vector<std::pair<Nat, Nat>> brute_tiling(const FuncSpec& f, Nat bound, std::size_t n_blocks) {
  std::vector<std::pair<Nat, Nat>> out;
  Nat lo = 0;
  while (out.size() < n_blocks) {
    for (Nat hi = lo; hi <= bound; ++hi) {
      bool closed = true;
      for (Nat y = 0; y <= bound && closed; ++y) {
        bool in_y = y >= lo && y <= hi, in_fy = f(y) >= lo && f(y) <= hi;
        closed = in_y == in_fy;
      }
      if (closed) {
        out.emplace_back(lo, hi);
        lo = hi + 1;
        break;
      }
      REQUIRE(hi < bound);
    }
  }
  return out;
}

std::vector<Nat> naive_cuts(const FuncSpec& f, Nat N) {
  std::vector<Nat> cuts;
  for (Nat m = 0; m <= N; ++m) {
    bool ok = true;
    for (Nat x = 0; x <= m; ++x) ok = ok && f(x) <= m;
    if (ok) cuts.push_back(m);
  }
  return cuts;
}

std::vector<std::size_t> word(const std::string& s) {
  std::vector<std::size_t> w;
  for (char c : s)
    if (c != ' ') w.push_back(static_cast<std::size_t>(c - '0'));
  return w;
}

}  // namespace

TEST_CASE("alpha prefixes of catalog functions") {
  SECTION("double-half") {
    auto f = FuncSpec::builtin(Builtin::DoubleHalf);
    auto t = alpha_prefix(f, 4, 100);
    CHECK(t.alpha == std::vector<std::size_t>{0, 0, 0, 0});
    REQUIRE(t.types.size() == 1);
    CHECK(t.types[0].size() == 2);
    auto brute = brute_tiling(f, 100, 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(t.block_starts[i] == brute[i].first);
  }
  SECTION("involution-g") {
    auto t = alpha_prefix(FuncSpec::builtin(Builtin::InvolutionG), 3, 100);
    CHECK(t.alpha == std::vector<std::size_t>{0, 1, 2});
    CHECK(t.type_size(0) == 6);
    CHECK(t.type_size(1) == 8);
    CHECK(t.type_size(2) == 10);
  }
  SECTION("identity") {
    auto t = alpha_prefix(FuncSpec::builtin(Builtin::Identity), 5, 100);
    CHECK(t.alpha == std::vector<std::size_t>(5, 0));
    CHECK(t.types == std::vector<std::vector<Nat>>{{0}});
  }
  SECTION("blocks that do not close are reported") {
    CHECK_THROWS_MATCHES(alpha_prefix(FuncSpec::builtin(Builtin::EulerPhi), 3, 200), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.kind() == ErrorKind::NotClosedWithinBound; }));
  }
  SECTION("tiling agrees with a direct interval search") {
    auto f = block_function({{1, 0}, {0}, {0, 0, 1}}, word("0120210211002"));
    // The final block touches the end of the table, so only the first 12 are certified.
    auto t = alpha_prefix(f, 12, f.eval_bound());
    auto brute = brute_tiling(f, f.eval_bound(), 12);
    for (std::size_t i = 0; i < 12; ++i) {
      CHECK(t.block_starts[i] == brute[i].first);
      CHECK(t.block_starts[i] + t.type_size(t.alpha[i]) - 1 == brute[i].second);
    }
    CHECK(t.alpha == word("012021021100"));
  }
}

TEST_CASE("counting profiles") {
  auto g = alpha_prefix(FuncSpec::builtin(Builtin::InvolutionG), 3, 100);
  CHECK(counting_prefix(g).counts == std::map<std::size_t, Nat>{{0, 1}, {1, 1}, {2, 1}});
  auto dh = alpha_prefix(FuncSpec::builtin(Builtin::DoubleHalf), 10, 100);
  CHECK(counting_prefix(dh).counts == std::map<std::size_t, Nat>{{0, 10}});
  CHECK(counting_prefix(TypeTable{}).counts.empty());

  std::vector<FuncSpec> catalog = {FuncSpec::builtin(Builtin::Identity), FuncSpec::builtin(Builtin::DoubleHalf),
                                   FuncSpec::builtin(Builtin::InvolutionG),
                                   block_function({{1, 0}, {0}, {1, 2, 0}}, word("0012011220120021012012001201120120210120121012"))};
  for (auto& f : catalog)
    for (std::size_t n = 0; n <= 40; ++n) {
      auto p = counting_prefix(alpha_prefix(f, n, std::min<Nat>(3000, f.eval_bound())));
      Nat total = 0;
      for (auto& [k, c] : p.counts) total += c;
      CHECK(total == n);
      CHECK(p.prefix_len == n);
    }
}

TEST_CASE("involution types are pairwise incomparable") {
  auto t = alpha_prefix(FuncSpec::builtin(Builtin::InvolutionG), 20, 1000);
  REQUIRE(t.types.size() == 20);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 20; ++j) {
      if (i == j) continue;
      auto a = FBlock::from_shape(t.types[i]), b = FBlock::from_shape(t.types[j]);
      CHECK_FALSE(iso_type(a, b));
      CHECK_FALSE(embeds(a, b));
    }
}

TEST_CASE("quasi-block cuts") {
  CHECK(quasi_block_cuts(FuncSpec::builtin(Builtin::Identity), 12).size() == 13);
  auto phi = quasi_block_cuts(FuncSpec::builtin(Builtin::EulerPhi), 30);
  for (Nat m = 1; m <= 30; ++m) CHECK(std::find(phi.begin(), phi.end(), m) != phi.end());
  auto shifted = FuncSpec::builtin(Builtin::Identity).with_overrides({{0, 5}});
  std::vector<Nat> want(6);
  std::iota(want.begin(), want.end(), 5);
  CHECK(quasi_block_cuts(shifted, 10) == want);

  for (auto text : {"n + 1", "2 * (n / 3)", "n % 7 + n / 2", "(n * n) % 11", "sqrt(n) * 3"}) {
    auto f = FuncSpec::expression(text, 500);
    CHECK(quasi_block_cuts(f, 120) == naive_cuts(f, 120));
  }
}

TEST_CASE("find_case trichotomy") {
  SECTION("(01 10)^w gives case A with sigma 01, tau 10") {
    std::vector<std::size_t> a;
    for (int i = 0; i < 50; ++i) a.insert(a.end(), {0, 1, 1, 0});
    auto w = find_case(a, a.size());
    REQUIRE(w.kind == CaseWitness::Case::A);
    CHECK(w.sigma == std::vector<std::size_t>{0, 1});
    CHECK(w.tau == std::vector<std::size_t>{1, 0});
    CHECK(w.h == std::vector<std::size_t>{1, 0});
    CHECK_FALSE(w.sigma_positions.empty());
    CHECK_FALSE(w.tau_positions.empty());
  }
  SECTION("general sigma/tau carry the permutation") {
    std::vector<std::size_t> a;
    for (int i = 0; i < 40; ++i) {
      auto s = word(i % 2 ? "012301" : "013021");
      a.insert(a.end(), s.begin(), s.end());
    }
    auto w = find_case(a, a.size());
    REQUIRE(w.kind == CaseWitness::Case::A);
    for (std::size_t i = 0; i < w.tau.size(); ++i) CHECK(w.tau[i] == w.sigma[w.h[i]]);
    for (auto p : w.sigma_positions) CHECK(std::equal(w.sigma.begin(), w.sigma.end(), a.begin() + p));
    for (auto p : w.tau_positions) CHECK(std::equal(w.tau.begin(), w.tau.end(), a.begin() + p));
  }
  SECTION("all zeros gives case B") {
    auto w = find_case(std::vector<std::size_t>(64, 0), 64);
    CHECK(w.kind == CaseWitness::Case::B);
    CHECK(w.k == 0);
  }
  SECTION("finite junk before a single recurring type is still case B") {
    auto a = word("21");
    a.resize(80, 0);
    auto w = find_case(a, a.size());
    CHECK(w.kind == CaseWitness::Case::B);
    CHECK(w.k == 0);
  }
  SECTION("growing runs 1 0^m 2 expose a C witness") {
    std::vector<std::size_t> a;
    for (std::size_t m = 1; m <= 12; ++m) {
      a.push_back(1);
      a.insert(a.end(), m, 0);
      a.push_back(2);
    }
    auto c = find_c_witness(a, a.size());
    REQUIRE(c);
    CHECK(c->kind == CaseWitness::Case::C);
    CHECK(c->b == 0);
    CHECK(c->d == 1);
    CHECK(c->e == 2);
    REQUIRE(c->occurrences.size() == 12);
    for (std::size_t i = 0; i + 1 < c->occurrences.size(); ++i) CHECK(c->occurrences[i].m < c->occurrences[i + 1].m);
    for (auto o : c->occurrences) {
      CHECK(a[o.pos] == 1);
      for (std::size_t k = 1; k <= o.m; ++k) CHECK(a[o.pos + k] == 0);
      CHECK(a[o.pos + o.m + 1] == 2);
    }
    // The same prefix also has recurring permuted factors, so the trichotomy search stops at A.
    CHECK(find_case(a, a.size()).kind == CaseWitness::Case::A);
  }
  SECTION("too short a window is inconclusive") {
    CHECK_THROWS_AS(find_case(word("012"), 3), Error);
  }
}

TEST_CASE("classify with evidence") {
  SECTION("constant") {
    auto f = FuncSpec::builtin(Builtin::Constant, 7);
    auto c = classify(f, 1000);
    CHECK(c.verdict == Verdict::IntrinsicallyComputable);
    CHECK(c.trivial == TrivialKind::AlmostConstant);
    CHECK(c.constant == 7);
    CHECK_FALSE(c.last_exception);
    CHECK(verify_evidence(f, c));
  }
  SECTION("near identity") {
    auto f = FuncSpec::builtin(Builtin::Identity).with_overrides({{3, 10}, {40, 2}});
    auto c = classify(f, 1000);
    CHECK(c.verdict == Verdict::IntrinsicallyComputable);
    CHECK(c.trivial == TrivialKind::AlmostIdentity);
    CHECK(c.last_exception == Nat{40});
    CHECK(verify_evidence(f, c));
  }
  SECTION("euler phi") {
    auto f = FuncSpec::builtin(Builtin::EulerPhi);
    auto c = classify(f, 100000);
    CHECK(c.verdict == Verdict::QuasiBlockWithComputableBound);
    CHECK(c.minorant == "sqrt(n/2)");
    CHECK(verify_evidence(f, c));
    // Independent check of the minorant against a direct totient.
    auto phi = [](Nat n) {
      Nat r = 0;
      for (Nat k = 1; k <= n; ++k) r += std::gcd(k, n) == 1;
      return r;
    };
    for (Nat n = 0; n <= 2000; ++n) CHECK(detail::isqrt(n / 2) <= phi(n));
  }
  SECTION("hand-built non-quasi-block") {
    auto f = FuncSpec::expression("n + n / 2 + 1", 5000);
    auto c = classify(f, 5000);
    REQUIRE(c.verdict == Verdict::NonQuasiBlockWitnessed);
    CHECK(c.window_start == 0);
    CHECK(c.witnesses.size() == 5001);
    for (auto [n, m] : c.witnesses) CHECK((m <= n && f(m) > n));
    CHECK(verify_evidence(f, c));
    auto forged = c;
    forged.witnesses[17].second = 0;
    CHECK_FALSE(verify_evidence(f, forged));
  }
  SECTION("double-half is a block function of case B") {
    auto f = FuncSpec::builtin(Builtin::DoubleHalf);
    auto c = classify(f, 1000);
    REQUIRE(c.verdict == Verdict::BlockFinitelyManyTypes);
    REQUIRE(c.case_witness);
    CHECK(c.case_witness->kind == CaseWitness::Case::B);
    CHECK(verify_evidence(f, c));
  }
  SECTION("involution-g has ever new types") {
    auto f = FuncSpec::builtin(Builtin::InvolutionG);
    auto c = classify(f, 2000);
    REQUIRE(c.verdict == Verdict::BlockInfinitelyManyTypes);
    REQUIRE(c.table);
    for (std::size_t i = 1; i < c.table->types.size(); ++i) CHECK(c.table->type_size(i) == c.table->type_size(i - 1) + 2);
    CHECK(verify_evidence(f, c));
  }
  SECTION("divisor count stays unresolved") {
    auto f = FuncSpec::builtin(Builtin::DivisorCount);
    auto c = classify(f, 20000);
    CHECK(c.verdict == Verdict::ProperQuasiBlockUnresolved);
    CHECK(verify_evidence(f, c));
  }
  SECTION("two alternating types is case A") {
    std::vector<std::size_t> w;
    for (int i = 0; i < 100; ++i) w.push_back(i % 3 == 0 ? 1 : 0);
    auto f = block_function({{1, 0}, {0}}, w);
    auto c = classify(f, f.eval_bound());
    REQUIRE(c.verdict == Verdict::BlockFinitelyManyTypes);
    CHECK(c.case_witness->kind == CaseWitness::Case::A);
  }
}
