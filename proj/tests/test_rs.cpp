#include <catch_amalgamated.hpp>

#include "omega_spectra/constructions.hpp"
#include "omega_spectra/rs.hpp"

using namespace omega_spectra;

namespace {

std::vector<Nat> first_labels(const SealedLog& log, std::size_t k) {
  std::vector<Nat> v;
  for (Nat r = 0; r < k; ++r) v.push_back(log.element_at(r));
  return v;
}

// Every segment element sits at its own rank and every successor is the next rank.
void check_against_log(const RsResult& r, const SealedLog& log) {
  for (std::size_t i = 0; i < r.segment.size(); ++i) REQUIRE(log.rank(r.segment[i]) == i);
  REQUIRE(r.successor.size() + 1 == r.segment.size());
  for (auto [x, s] : r.successor) REQUIRE(s == log.element_at(log.rank(x) + 1));
}

Schedule random_schedule(Nat seed) {
  Schedule s;
  s.policy = InsertionPolicy::RandomFiniteDelay;
  s.delay = 12;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("adversarial copies") {
  SECTION("identity schedule is (ω,<) itself") {
    auto g = adversarial_copy({}, 100);
    for (Nat x = 0; x < 100; ++x) CHECK(g.log.rank(x) == x);
  }
  SECTION("delay-evens puts evens between odds") {
    Schedule s;
    s.policy = InsertionPolicy::DelayEvens;
    s.delay = 4;
    auto g = adversarial_copy(s, 200);
    std::size_t early = 0;
    for (Nat x = 10; x < 190; x += 2) {
      Nat r = g.log.rank(x);
      Nat before = g.log.element_at(r - 1), after = g.log.element_at(r + 1);
      CHECK(before % 2 == 1);
      CHECK(after % 2 == 1);
      if (r < x) ++early;
    }
    CHECK(early > 0);
  }
  SECTION("random finite delay gives a consistent copy of size 500") {
    auto g = adversarial_copy(random_schedule(7), 500);
    std::vector<Nat> labels(500);
    std::iota(labels.begin(), labels.end(), 0);
    std::sort(labels.begin(), labels.end(), [&](Nat a, Nat b) { return g.copy.precedes(a, b); });
    for (Nat r = 0; r < 500; ++r) CHECK(g.log.element_at(r) == labels[r]);
    CHECK(labels != first_labels(SealedLog([] {
                                   std::vector<Nat> v(500);
                                   std::iota(v.begin(), v.end(), 0);
                                   return v;
                                 }()),
                                 500));
  }
  SECTION("same seed, same copy") {
    auto a = adversarial_copy(random_schedule(3), 300), b = adversarial_copy(random_schedule(3), 300);
    CHECK(first_labels(a.log, 300) == first_labels(b.log, 300));
  }
  SECTION("inserting at the front never settles") {
    Schedule s;
    s.policy = InsertionPolicy::InsertAtFront;
    CHECK_THROWS_MATCHES(adversarial_copy(s, 500), Error, Catch::Matchers::Predicate<Error>([](const Error& e) { return e.kind() == ErrorKind::PolicyViolation; }));
  }
}

TEST_CASE("non-quasi-block instance") {
  auto f = FuncSpec::expression("n + n / 2 + 1", 100000);
  const Nat n0 = non_quasi_block_start(f, 5000);
  CHECK(n0 == 0);
  auto cond = cond_non_quasi_block();
  for (Nat seed = 1; seed <= 5; ++seed) {
    auto g = adversarial_copy(random_schedule(seed), 500);
    auto fA = image_oracle(f, g.log);
    auto init = first_labels(g.log, n0 + 1);
    const std::size_t touched = g.log.accesses();
    auto r = rs_run(g.copy, fA, f, cond, init, 10);
    CHECK(g.log.accesses() == touched);
    CHECK(r.rounds.size() == 10);
    CHECK(r.segment.size() > 10);
    check_against_log(r, g.log);
    // successor of the minimum is the least of the rest
    Nat least_rest = 0;
    bool any = false;
    for (Nat x = 0; x < 500; ++x)
      if (x != init[0] && (!any || g.copy.precedes(x, least_rest))) least_rest = x, any = true;
    CHECK(r.successor.at(init[0]) == least_rest);
  }
}

TEST_CASE("non-quasi-block instance on doubling") {
  auto f = FuncSpec::expression("2 * n", 100000);
  const Nat n0 = non_quasi_block_start(f, 1000);
  CHECK(n0 == 1);
  auto g = adversarial_copy(random_schedule(11), 600);
  auto fA = image_oracle(f, g.log);
  auto r = rs_run(g.copy, fA, f, cond_non_quasi_block(), first_labels(g.log, 2), 8);
  std::size_t n = 1;
  for (auto& round : r.rounds) {
    CHECK(round.n == 2 * n);
    n = round.n;
  }
  check_against_log(r, g.log);
}

TEST_CASE("identity has no non-quasi-block start") {
  CHECK_THROWS_MATCHES(non_quasi_block_start(FuncSpec::builtin(Builtin::Identity), 1000), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) { return e.kind() == ErrorKind::WitnessMissing; }));
}

TEST_CASE("bound instance on Euler's phi") {
  auto f = FuncSpec::builtin(Builtin::EulerPhi);
  auto L = FuncSpec::expression("sqrt(n / 2)");
  // brute force: [0, n] closed under f and f^-1 only for n = 0 below 2000
  auto v = f.tabulate(20000);
  for (Nat n = 1; n < 2000; ++n) {
    bool closed = true;
    for (Nat x = 0; x < v.size() && closed; ++x) closed = (x <= n) == (v[x] <= n);
    CHECK_FALSE(closed);
  }
  auto cond = cond_bound(f, L, 200000);
  std::size_t preimage_rounds = 0;
  for (Nat seed = 1; seed <= 3; ++seed) {
    auto g = adversarial_copy(random_schedule(100 + seed), 500);
    auto fA = image_oracle(f, g.log);
    auto init = first_labels(g.log, 3);
    const std::size_t touched = g.log.accesses();
    auto r = rs_run(g.copy, fA, f, cond, init, 10);
    CHECK(g.log.accesses() == touched);
    check_against_log(r, g.log);
    for (auto& round : r.rounds) preimage_rounds += round.branch == "preimage";
  }
  CHECK(preimage_rounds == 30);
}

TEST_CASE("bound instance: strictly increasing f stays in branch 1") {
  auto f = FuncSpec::expression("n + 3");
  auto cond = cond_bound(f, FuncSpec::builtin(Builtin::Identity), 1000);
  auto g = adversarial_copy(random_schedule(5), 200);
  auto fA = image_oracle(f, g.log);
  auto r = rs_run(g.copy, fA, f, cond, first_labels(g.log, 1), 10);
  for (auto& round : r.rounds) CHECK(round.branch == "image");
  check_against_log(r, g.log);
}

TEST_CASE("bound instance rejects bad minorants") {
  auto nd = FuncSpec::builtin(Builtin::DivisorCount);
  CHECK_THROWS_MATCHES(cond_bound(nd, FuncSpec::expression("sqrt(n / 2)"), 1000), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) { return e.kind() == ErrorKind::BranchFailure; }));
  CHECK_THROWS_AS(cond_bound(FuncSpec::builtin(Builtin::EulerPhi), FuncSpec::expression("7"), 1000), Error);
}

TEST_CASE("recreating involution blocks") {
  auto g = FuncSpec::builtin(Builtin::InvolutionG);
  auto c = adversarial_copy(random_schedule(21), 400);
  auto gA = image_oracle(g, c.log);
  auto ranks = [&](const std::vector<Nat>& blk) {
    std::vector<Nat> r;
    for (Nat x : blk) r.push_back(c.log.rank(x));
    return r;
  };
  CHECK(recreate_block(c.log.element_at(1), gA, c.copy).size() == 6);
  for (Nat r = 6; r < 14; ++r) CHECK(recreate_block(c.log.element_at(r), gA, c.copy).size() == 8);
  for (Nat k = 0; k < 10; ++k) {
    const Nat start = k * k + 5 * k, len = 6 + 2 * k;
    for (Nat r = start; r < start + len; r += 3) {
      auto blk = ranks(recreate_block(c.log.element_at(r), gA, c.copy));
      std::vector<Nat> want(len);
      std::iota(want.begin(), want.end(), start);
      CHECK(blk == want);
    }
  }
}

TEST_CASE("involution instance") {
  auto g = FuncSpec::builtin(Builtin::InvolutionG);
  for (Nat seed = 1; seed <= 3; ++seed) {
    auto c = adversarial_copy(random_schedule(seed), 500);
    auto gA = image_oracle(g, c.log);
    auto init = first_labels(c.log, 6);
    const std::size_t touched = c.log.accesses();
    auto r = rs_run(c.copy, gA, g, cond_involution(), init, 5);
    CHECK(c.log.accesses() == touched);
    for (std::size_t t = 0; t < 5; ++t) CHECK(r.rounds[t].n + 1 == (t + 2) * (t + 2) + 5 * (t + 2));
    check_against_log(r, c.log);
  }
}

TEST_CASE("michal instance") {
  GSequence gs;
  for (Nat i = 0; i < 400; i += 2) gs.values.insert(gs.values.end(), {i + 1, i});
  auto m = michal_build(gs, 400);
  auto c = adversarial_copy(random_schedule(9), 400);
  auto fA = image_oracle(m.f, c.log);
  auto r = rs_run(c.copy, fA, m.f, cond_michal(399), first_labels(c.log, 2), 10);
  check_against_log(r, c.log);
  // the same walk directly on the table
  Nat n = 1;
  for (auto& round : r.rounds) {
    Nat y = n + 1;
    while (m.values[y] == y || m.values[y] > n) ++y;
    CHECK(round.n == y);
    n = y;
  }
}

TEST_CASE("oracle budget") {
  auto f = FuncSpec::expression("n + n / 2 + 1", 100000);
  auto c = adversarial_copy({}, 100);
  auto fA = image_oracle(f, c.log, 3);
  CHECK_THROWS_MATCHES(rs_run(c.copy, fA, f, cond_non_quasi_block(), {0}, 10), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) { return e.kind() == ErrorKind::OracleBudgetExceeded; }));
  // too small a copy
  auto small = adversarial_copy({}, 20);
  auto fs = image_oracle(f, small.log);
  CHECK_THROWS_AS(rs_run(small.copy, fs, f, cond_non_quasi_block(), {0}, 10), Error);
}
