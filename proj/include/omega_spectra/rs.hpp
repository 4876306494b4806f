#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "block.hpp"
#include "error.hpp"
#include "func_spec.hpp"

namespace omega_spectra {

// ---------------------------------------------------------------------------
// Computable copies of a finite initial part of (ω,<).

/// Ground truth for a generated copy. Only the test harness reads it.
class SealedLog {
 public:
  SealedLog() = default;
  explicit SealedLog(std::vector<Nat> order) : order_(std::move(order)), rank_(order_.size()) {
    for (std::size_t i = 0; i < order_.size(); ++i) rank_.at(order_[i]) = i;
  }
  std::size_t size() const { return order_.size(); }
  /// Rank of label x, i.e. the natural number it represents.
  Nat rank(Nat x) const {
    ++accesses_;
    return rank_.at(x);
  }
  /// Label sitting at rank r.
  Nat element_at(Nat r) const {
    ++accesses_;
    return order_.at(r);
  }
  std::size_t accesses() const { return accesses_; }

 private:
  std::vector<Nat> order_;
  std::vector<Nat> rank_;
  mutable std::size_t accesses_ = 0;
};

/// The comparator of a copy. Labels are 0..size()-1.
class ComputableCopy {
 public:
  ComputableCopy() = default;
  explicit ComputableCopy(const std::vector<Nat>& order) : key_(order.size()) {
    for (std::size_t i = 0; i < order.size(); ++i) key_.at(order[i]) = i;
  }
  std::size_t size() const { return key_.size(); }
  bool precedes(Nat a, Nat b) const {
    ++queries_;
    return key_.at(a) < key_.at(b);
  }
  std::size_t queries() const { return queries_; }

 private:
  std::vector<Nat> key_;
  mutable std::size_t queries_ = 0;
};

enum class InsertionPolicy { Identity, DelayEvens, RandomFiniteDelay, InsertAtFront };

inline const char* to_string(InsertionPolicy p) {
  switch (p) {
    case InsertionPolicy::Identity: return "identity";
    case InsertionPolicy::DelayEvens: return "delay-evens";
    case InsertionPolicy::RandomFiniteDelay: return "random-finite-delay";
    case InsertionPolicy::InsertAtFront: return "insert-at-front";
  }
  return "?";
}

inline InsertionPolicy insertion_policy_from_string(const std::string& s) {
  for (auto p : {InsertionPolicy::Identity, InsertionPolicy::DelayEvens, InsertionPolicy::RandomFiniteDelay, InsertionPolicy::InsertAtFront})
    if (s == to_string(p)) return p;
  fail(ErrorKind::InputError, "unknown schedule '" + s + "'");
}

struct Schedule {
  InsertionPolicy policy = InsertionPolicy::Identity;
  Nat delay = 8;         // delay-evens distance, random max delay
  Nat seed = 0;
  Nat descent_limit = 256;  // max later insertions in front of any one element
};

struct GeneratedCopy {
  ComputableCopy copy;
  SealedLog log;
  Schedule schedule;
};

/// Labels 0..n-1 arrive in order; the policy picks where each lands in the current list.
inline GeneratedCopy adversarial_copy(const Schedule& sch, std::size_t n) {
  std::vector<Nat> list;
  std::mt19937_64 rng(sch.seed);
  std::vector<Nat> in_front(n, 0);  // insertions in front of each label after its own
  for (Nat x = 0; x < n; ++x) {
    std::size_t at = list.size();
    switch (sch.policy) {
      case InsertionPolicy::Identity: break;
      case InsertionPolicy::DelayEvens:
        if (x % 2 == 0) at = list.size() > sch.delay ? list.size() - sch.delay : 0;
        break;
      case InsertionPolicy::RandomFiniteDelay: {
        std::uniform_int_distribution<Nat> d(0, std::min<Nat>(sch.delay, list.size()));
        at = list.size() - d(rng);
        break;
      }
      case InsertionPolicy::InsertAtFront: at = 0; break;
    }
    for (std::size_t i = at; i < list.size(); ++i)
      if (++in_front[list[i]] > sch.descent_limit)
        fail(ErrorKind::PolicyViolation, "label " + std::to_string(list[i]) + " keeps receiving predecessors: schedule '" +
                                             to_string(sch.policy) + "' does not converge to order type omega");
    list.insert(list.begin() + static_cast<std::ptrdiff_t>(at), x);
  }
  return {ComputableCopy(list), SealedLog(list), sch};
}

/// f_A as an oracle on labels; tabulated once from the log when the copy is built.
class FOracle {
 public:
  FOracle() = default;
  FOracle(std::vector<std::optional<Nat>> table, std::size_t budget) : table_(std::move(table)), budget_(budget) {}
  Nat operator()(Nat x) const {
    if (++queries_ > budget_) fail(ErrorKind::OracleBudgetExceeded, "f_A oracle budget of " + std::to_string(budget_) + " queries exhausted");
    const auto& v = table_.at(x);
    if (!v) fail(ErrorKind::OracleBudgetExceeded, "f_A(" + std::to_string(x) + ") lies beyond the generated copy");
    return *v;
  }
  std::size_t queries() const { return queries_; }

 private:
  std::vector<std::optional<Nat>> table_;
  std::size_t budget_ = 0;
  mutable std::size_t queries_ = 0;
};

inline FOracle image_oracle(const FuncSpec& f, const SealedLog& log, std::size_t budget = 10'000'000) {
  std::vector<std::optional<Nat>> t(log.size());
  for (Nat x = 0; x < log.size(); ++x) {
    Nat v = f(log.rank(x));
    if (v < log.size()) t[x] = log.element_at(v);
  }
  return FOracle(std::move(t), budget);
}

// ---------------------------------------------------------------------------
// The retrieval loop.

/// What an instance sees: the comparator, the f_A oracle and f itself.
struct RsContext {
  const ComputableCopy& copy;
  const FOracle& fA;
  const FuncSpec& f;
  const std::vector<Nat>& segment;  // k_0 .. k_n in ≺-order
  std::size_t n() const { return segment.size() - 1; }
};

struct Extension {
  std::optional<std::pair<Nat, Nat>> target;  // (m, k_m): fill everything between k_n and k_m
  std::vector<Nat> block;                      // or: elements to append directly, any order
  std::string branch;
};

struct RsCondition {
  std::string id;
  std::function<bool(const RsContext&)> holds;
  std::function<Extension(const RsContext&)> extend;
};

struct RsRound {
  std::size_t n = 0;  // segment is k_0..k_n after the round
  std::string branch;
  bool operator==(const RsRound&) const = default;
};

struct RsResult {
  std::string instance;
  std::vector<Nat> segment;
  std::map<Nat, Nat> successor;
  std::vector<RsRound> rounds;
  std::size_t comparator_queries = 0;
  std::size_t oracle_queries = 0;
};

namespace detail {

inline void sort_by(std::vector<Nat>& v, const ComputableCopy& c) {
  std::sort(v.begin(), v.end(), [&](Nat a, Nat b) { return c.precedes(a, b); });
}

/// The m - n - 1 labels strictly between k_n and k_m, in order.
inline std::vector<Nat> fill_between(const RsContext& ctx, Nat m, Nat km) {
  const std::size_t n = ctx.n();
  if (m <= n) fail(ErrorKind::ConditionViolated, "extension target does not lie beyond the segment");
  const Nat kn = ctx.segment.back();
  std::set<Nat> inside(ctx.segment.begin(), ctx.segment.end());
  std::vector<Nat> found;
  const std::size_t need = m - n - 1;
  for (Nat x = 0; x < ctx.copy.size() && found.size() < need; ++x) {
    if (inside.count(x) || x == km) continue;
    if (ctx.copy.precedes(kn, x) && ctx.copy.precedes(x, km)) found.push_back(x);
  }
  if (found.size() < need)
    fail(ErrorKind::OracleBudgetExceeded, "only " + std::to_string(found.size()) + " of " + std::to_string(need) + " elements found in the generated copy");
  sort_by(found, ctx.copy);
  found.push_back(km);
  return found;
}

}  // namespace detail

/// Extends the given initial segment `rounds` times. The segment is a certified
/// input: k_0, ..., k_{n0} in ≺-order.
inline RsResult rs_run(const ComputableCopy& copy, const FOracle& fA, const FuncSpec& f, const RsCondition& cond,
                       std::vector<Nat> initial, std::size_t rounds) {
  if (initial.empty()) fail(ErrorKind::InputError, "initial segment is empty");
  const std::size_t q0 = copy.queries(), o0 = fA.queries();
  RsResult r;
  r.instance = cond.id;
  r.segment = std::move(initial);
  auto ctx = [&]() { return RsContext{copy, fA, f, r.segment}; };
  if (!cond.holds(ctx())) fail(ErrorKind::ConditionViolated, cond.id + ": condition fails on the initial segment");
  for (std::size_t t = 0; t < rounds; ++t) {
    auto ext = cond.extend(ctx());
    std::vector<Nat> add;
    if (ext.target) {
      add = detail::fill_between(ctx(), ext.target->first, ext.target->second);
    } else {
      add = ext.block;
      detail::sort_by(add, copy);
      if (add.empty() || !copy.precedes(r.segment.back(), add.front()))
        fail(ErrorKind::ConditionViolated, cond.id + ": extension block does not follow the segment");
    }
    r.segment.insert(r.segment.end(), add.begin(), add.end());
    if (!cond.holds(ctx())) fail(ErrorKind::ConditionViolated, cond.id + ": condition fails after round " + std::to_string(t + 1));
    r.rounds.push_back({r.segment.size() - 1, ext.branch});
  }
  for (std::size_t i = 0; i + 1 < r.segment.size(); ++i) r.successor[r.segment[i]] = r.segment[i + 1];
  r.comparator_queries = copy.queries() - q0;
  r.oracle_queries = fA.queries() - o0;
  return r;
}

// ---------------------------------------------------------------------------
// Instances.

/// Least n0 such that every n in (n0, window] has some m <= n with f(m) > n.
inline Nat non_quasi_block_start(const FuncSpec& f, Nat window) {
  auto v = f.tabulate(window + 1);
  // running max of f over [0, n]; n is bad when it is <= n
  std::optional<Nat> last_bad;
  Nat mx = 0;
  for (Nat n = 0; n <= window; ++n) {
    mx = std::max(mx, v[n]);
    if (mx <= n) last_bad = n;
  }
  if (!last_bad) return 0;
  if (*last_bad >= window / 2)
    fail(ErrorKind::WitnessMissing, "f closes the initial segment [0, " + std::to_string(*last_bad) + "]; not non-quasi-block at this scale");
  return *last_bad + 1;
}

/// Some j in the segment is sent beyond it; extend to the largest such image.
inline RsCondition cond_non_quasi_block() {
  RsCondition c;
  c.id = "non-quasi-block";
  c.holds = [](const RsContext& x) {
    for (Nat j = 0; j <= x.n(); ++j)
      if (x.f(j) > x.n()) return true;
    return false;
  };
  c.extend = [](const RsContext& x) {
    Nat best = 0;
    for (Nat j = 1; j <= x.n(); ++j)
      if (x.f(j) > x.f(best)) best = j;
    const Nat m = x.f(best);
    if (m <= x.n()) fail(ErrorKind::WitnessMissing, "no element of the segment is sent beyond it");
    Extension e;
    e.target = std::pair{m, x.fA(x.segment.at(best))};
    e.branch = "image";
    return e;
  };
  return c;
}

/// Minorant check on [0, bound]: L <= f and L non-decreasing; L(bound) must exceed L(0).
inline void require_minorant(const FuncSpec& f, const FuncSpec& L, Nat bound) {
  Nat prev = 0;
  for (Nat n = 0; n <= bound; ++n) {
    Nat l = L(n);
    if (l > f(n)) fail(ErrorKind::BranchFailure, "minorant exceeds f at " + std::to_string(n));
    if (l < prev) fail(ErrorKind::BranchFailure, "minorant decreases at " + std::to_string(n));
    prev = l;
  }
  if (L(bound) <= L(0)) fail(ErrorKind::BranchFailure, "minorant does not grow on [0, " + std::to_string(bound) + "]");
}

/// Arguments x with f(x) = m, all below the first x where L(x) > m.
inline std::vector<Nat> preimages_via_minorant(const FuncSpec& f, const FuncSpec& L, Nat m, Nat search_cap) {
  std::vector<Nat> out;
  for (Nat x = 0;; ++x) {
    if (x > search_cap) fail(ErrorKind::BranchFailure, "minorant does not exceed " + std::to_string(m) + " below " + std::to_string(search_cap));
    if (L(x) > m) break;
    if (f(x) == m) out.push_back(x);
  }
  return out;
}

/// Segment not closed under both f and f^-1. Branch 1 follows an image beyond the
/// segment; branch 2 counts preimages with the minorant and jumps to the largest.
inline RsCondition cond_bound(const FuncSpec& f, const FuncSpec& minorant, Nat check_bound) {
  require_minorant(f, minorant, check_bound);
  RsCondition c;
  c.id = "bound";
  c.holds = [minorant, check_bound](const RsContext& x) {
    const Nat n = x.n();
    for (Nat j = 0; j <= n; ++j)
      if (x.f(j) > n) return true;
    // an argument beyond the segment mapping into it; past the first y with L(y) > n there is none
    for (Nat y = n + 1; minorant(y) <= n; ++y) {
      if (y > check_bound) fail(ErrorKind::BranchFailure, "minorant does not exceed " + std::to_string(n) + " below " + std::to_string(check_bound));
      if (x.f(y) <= n) return true;
    }
    return false;
  };
  c.extend = [minorant, check_bound](const RsContext& x) {
    const Nat n = x.n();
    Extension e;
    for (Nat j = 0; j <= n; ++j)
      if (x.f(j) > n) {
        e.target = std::pair{x.f(j), x.fA(x.segment.at(j))};
        e.branch = "image";
        return e;
      }
    for (Nat m = 0; m <= n; ++m) {
      auto pre = preimages_via_minorant(x.f, minorant, m, check_bound);
      const std::size_t beyond = std::count_if(pre.begin(), pre.end(), [n](Nat y) { return y > n; });
      if (beyond == 0) continue;
      // locate the copies of the outside preimages of k_m and keep the ≺-largest
      const Nat km = x.segment.at(m);
      std::set<Nat> inside(x.segment.begin(), x.segment.end());
      std::optional<Nat> last;
      std::size_t seen = 0;
      for (Nat y = 0; y < x.copy.size() && seen < beyond; ++y) {
        if (inside.count(y) || x.fA(y) != km) continue;
        ++seen;
        if (!last || x.copy.precedes(*last, y)) last = y;
      }
      if (seen < beyond) fail(ErrorKind::OracleBudgetExceeded, "preimages of k_" + std::to_string(m) + " lie beyond the generated copy");
      e.target = std::pair{pre.back(), *last};
      e.branch = "preimage";
      return e;
    }
    fail(ErrorKind::BranchFailure, "segment is closed under f and its inverse");
  };
  return c;
}

/// Recreates the g-block of a from the involution's image in the copy.
inline std::vector<Nat> recreate_block(Nat a, const FOracle& g, const ComputableCopy& copy) {
  auto between = [&](Nat x, Nat lo, Nat hi) {
    if (copy.precedes(hi, lo)) std::swap(lo, hi);
    return copy.precedes(lo, x) && copy.precedes(x, hi);
  };
  std::set<Nat> G{a};
  std::vector<Nat> work{a};
  while (!work.empty()) {
    Nat x = work.back();
    work.pop_back();
    Nat gx = g(x);
    std::vector<Nat> ys;
    if (gx == x) {
      // the one pair (y, g(y)) straddling x
      for (Nat y = 0; y < copy.size() && ys.empty(); ++y) {
        if (y == x) continue;
        Nat gy = g(y);
        if (gy != y && between(x, y, gy)) ys = {y, gy};
      }
    } else {
      for (Nat y = 0; y < copy.size() && ys.size() < 2; ++y)
        if (y != x && y != gx && between(y, x, gx)) ys.push_back(y);
      ys.push_back(gx);
    }
    for (Nat y : ys)
      if (G.insert(y).second) work.push_back(y);
  }
  std::vector<Nat> out(G.begin(), G.end());
  detail::sort_by(out, copy);
  return out;
}

namespace detail {

/// Relative shape of a set of labels sorted by ≺, under oracle g.
inline std::vector<Nat> shape_in_copy(const std::vector<Nat>& sorted, const FOracle& g) {
  std::map<Nat, Nat> at;
  for (std::size_t i = 0; i < sorted.size(); ++i) at[sorted[i]] = i;
  std::vector<Nat> s;
  for (Nat x : sorted) {
    auto it = at.find(g(x));
    s.push_back(it == at.end() ? sorted.size() : it->second);
  }
  return s;
}

inline std::vector<Nat> involution_shape(Nat k) {
  const Nat start = detail::involution_block_start(k);
  std::vector<Nat> s;
  for (Nat i = 0; i < 6 + 2 * k; ++i) s.push_back(detail::involution_g(start + i) - start);
  return s;
}

}  // namespace detail

/// The segment is J_0 + ... + J_k. Extension recreates blocks of unused labels until
/// one is a copy of the next J.
inline RsCondition cond_involution() {
  RsCondition c;
  c.id = "involution";
  c.holds = [](const RsContext& x) {
    std::set<Nat> inside(x.segment.begin(), x.segment.end());
    std::set<Nat> done;
    for (Nat a : x.segment) {
      if (done.count(a)) continue;
      for (Nat y : recreate_block(a, x.fA, x.copy)) {
        if (!inside.count(y)) return false;
        done.insert(y);
      }
    }
    return true;
  };
  c.extend = [](const RsContext& x) {
    // the segment is J_0 + ... + J_{k-1}
    Nat k = 0;
    while (detail::involution_block_start(k) < x.segment.size()) ++k;
    if (detail::involution_block_start(k) != x.segment.size()) fail(ErrorKind::ConditionViolated, "segment size is not a sum of J sizes");
    const auto want = detail::involution_shape(k);
    std::set<Nat> used(x.segment.begin(), x.segment.end());
    for (Nat a = 0; a < x.copy.size(); ++a) {
      if (used.count(a)) continue;
      auto blk = recreate_block(a, x.fA, x.copy);
      used.insert(blk.begin(), blk.end());
      if (detail::shape_in_copy(blk, x.fA) == want) {
        Extension e;
        e.block = blk;
        e.branch = "J" + std::to_string(k);
        return e;
      }
    }
    fail(ErrorKind::OracleBudgetExceeded, "no copy of J_" + std::to_string(k) + " among the generated labels");
  };
  return c;
}

/// Some element beyond the segment is sent into it (f built from a g taking each value
/// once). Extension finds the least such argument and fills up to it.
inline RsCondition cond_michal(Nat search_cap) {
  RsCondition c;
  c.id = "michal";
  auto next = [search_cap](const RsContext& x) -> std::optional<Nat> {
    const Nat n = x.n();
    for (Nat y = n + 1; y <= search_cap; ++y) {
      Nat v = x.f(y);
      if (v != y && v <= n) return y;
    }
    return std::nullopt;
  };
  c.holds = [next](const RsContext& x) { return next(x).has_value(); };
  c.extend = [next](const RsContext& x) {
    auto y = next(x);
    if (!y) fail(ErrorKind::ConditionViolated, "no argument beyond the segment maps into it");
    const Nat kv = x.segment.at(x.f(*y));
    std::set<Nat> inside(x.segment.begin(), x.segment.end());
    for (Nat z = 0; z < x.copy.size(); ++z)
      if (!inside.count(z) && x.fA(z) == kv) {
        Extension e;
        e.target = std::pair{*y, z};
        e.branch = "preimage";
        return e;
      }
    fail(ErrorKind::OracleBudgetExceeded, "preimage lies beyond the generated copy");
  };
  return c;
}

// ---------------------------------------------------------------------------
// Harness side: these read the sealed log.

/// The shortest initial segment k_0..k_n (n < max_len) on which cond holds.
inline std::vector<Nat> advice_initial_segment(const SealedLog& log, const ComputableCopy& copy, const FOracle& fA, const FuncSpec& f,
                                               const RsCondition& cond, std::size_t max_len) {
  std::vector<Nat> seg;
  for (Nat r = 0; r < max_len && r < log.size(); ++r) {
    seg.push_back(log.element_at(r));
    if (cond.holds(RsContext{copy, fA, f, seg})) return seg;
  }
  fail(ErrorKind::WitnessMissing, cond.id + ": no initial segment of length <= " + std::to_string(max_len) + " satisfies the condition");
}

/// Mismatches between a retrieved segment and the generation log.
inline std::vector<std::string> verify_against_log(const RsResult& r, const SealedLog& log) {
  std::vector<std::string> bad;
  for (std::size_t i = 0; i < r.segment.size(); ++i)
    if (log.rank(r.segment[i]) != i) bad.push_back("label " + std::to_string(r.segment[i]) + " retrieved at " + std::to_string(i) + " has rank " + std::to_string(log.rank(r.segment[i])));
  for (auto [x, y] : r.successor)
    if (log.rank(x) + 1 >= log.size() || log.element_at(log.rank(x) + 1) != y) bad.push_back("wrong successor of " + std::to_string(x));
  return bad;
}

}  // namespace omega_spectra
