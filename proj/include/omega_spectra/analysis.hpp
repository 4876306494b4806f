#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "block.hpp"
#include "error.hpp"
#include "func_spec.hpp"

namespace omega_spectra {

/// Types in order of first appearance plus the prefix of α_f over them.
struct TypeTable {
  std::vector<std::vector<Nat>> types;  // canonical shapes
  std::vector<std::size_t> alpha;       // alpha[i] = type of the i-th block
  std::vector<Nat> block_starts;        // left end of the i-th block in ω

  std::size_t type_size(std::size_t t) const { return types.at(t).size(); }
  Nat covered() const { return block_starts.empty() ? 0 : block_starts.back() + types[alpha.back()].size(); }

  std::size_t intern(const std::vector<Nat>& shape) {
    auto it = std::find(types.begin(), types.end(), shape);
    if (it != types.end()) return static_cast<std::size_t>(it - types.begin());
    types.push_back(shape);
    return types.size() - 1;
  }

  void push_block(const FBlock& b) {
    alpha.push_back(intern(b.offsets));
    block_starts.push_back(b.lo);
  }
};

namespace detail {

inline TypeTable tile(const BlockScanner& sc, std::optional<std::size_t> n_blocks) {
  TypeTable t;
  Nat start = 0;
  while (!n_blocks || t.alpha.size() < *n_blocks) {
    if (start > sc.bound()) {
      if (n_blocks) fail(ErrorKind::NotClosedWithinBound, "ran out of bound after " + std::to_string(t.alpha.size()) + " blocks");
      break;
    }
    auto r = sc.scan(start);
    if (r.status != Closure::Closed) {
      if (n_blocks)
        fail(ErrorKind::NotClosedWithinBound, "block " + std::to_string(t.alpha.size()) + " starting at " + std::to_string(start) + " " +
                                                  to_string(r.status) + " (witness " + std::to_string(r.witness) + ")");
      break;
    }
    if (r.block->lo != start) fail(ErrorKind::InternalInvariantViolation, "block tiling left a gap at " + std::to_string(start));
    t.push_block(*r.block);
    start = r.block->hi + 1;
  }
  return t;
}

}  // namespace detail

/// The first n_blocks blocks of f, which must all close within bound.
inline TypeTable alpha_prefix(const FuncSpec& f, std::size_t n_blocks, Nat bound) {
  return detail::tile(BlockScanner(f, bound), n_blocks);
}

/// As many consecutive blocks from 0 as close within bound.
inline TypeTable alpha_within(const FuncSpec& f, Nat bound) { return detail::tile(BlockScanner(f, bound), std::nullopt); }

/// Build a function from block shapes laid out according to a type word.
inline FuncSpec block_function(const std::vector<std::vector<Nat>>& shapes, const std::vector<std::size_t>& word,
                               const std::string& label = "block-word") {
  std::vector<Nat> values;
  for (std::size_t t : word) {
    const auto& s = shapes.at(t);
    const Nat base = values.size();
    for (Nat v : s) {
      if (v >= s.size()) fail(ErrorKind::InputError, "block shape maps outside itself");
      values.push_back(base + v);
    }
  }
  return FuncSpec::table(std::move(values), label);
}

struct CountingProfile {
  std::map<std::size_t, Nat> counts;
  Nat prefix_len = 0;
};

inline CountingProfile counting_prefix(const TypeTable& t) {
  CountingProfile p;
  for (std::size_t k : t.alpha) ++p.counts[k];
  p.prefix_len = t.alpha.size();
  return p;
}

/// All m <= N with [0, m] closed under f.
inline std::vector<Nat> quasi_block_cuts(const FuncSpec& f, Nat N) {
  auto v = f.tabulate(N);
  std::vector<Nat> cuts;
  Nat running = 0;
  for (Nat m = 0; m <= N; ++m) {
    running = std::max(running, v[m]);
    if (running <= m) cuts.push_back(m);
  }
  return cuts;
}

// ---------------------------------------------------------------------------
// Case analysis of α_f for block functions with finitely many types.

struct COccurrence {
  std::size_t pos = 0;  // index of the d-block
  std::size_t m = 0;    // length of the b-run
  bool operator==(const COccurrence&) const = default;
};

struct CaseWitness {
  enum class Case { A, B, C };
  Case kind = Case::B;
  std::size_t window = 0;
  std::vector<std::size_t> recurrent;  // symbols seen in the late half of the window
  // A
  std::vector<std::size_t> sigma, tau, h;  // tau[i] == sigma[h[i]]
  std::vector<std::size_t> sigma_positions, tau_positions;
  // B
  std::size_t k = 0;
  std::size_t k_late_count = 0;
  // C
  std::size_t b = 0, d = 0, e = 0;
  std::vector<COccurrence> occurrences;
};

inline const char* to_string(CaseWitness::Case c) {
  switch (c) {
    case CaseWitness::Case::A: return "A";
    case CaseWitness::Case::B: return "B";
    case CaseWitness::Case::C: return "C";
  }
  return "?";
}

/// Runs d b^m e with d != b != e, for the triple whose runs grow longest.
inline std::optional<CaseWitness> find_c_witness(const std::vector<std::size_t>& alpha, std::size_t window) {
  const std::size_t W = std::min(window, alpha.size());
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::vector<COccurrence>> runs;
  for (std::size_t i = 1; i < W;) {
    std::size_t j = i;
    while (j < W && alpha[j] == alpha[i]) ++j;
    if (j < W && alpha[i - 1] != alpha[i]) runs[{alpha[i - 1], alpha[i], alpha[j]}].push_back({i - 1, j - i});
    i = j;
  }
  std::optional<CaseWitness> best;
  std::size_t best_m = 0;
  for (auto& [key, occ] : runs) {
    auto [d, b, e] = key;
    std::set<std::size_t> ms;
    std::size_t max_m = 0, max_pos = 0;
    for (auto& o : occ) {
      ms.insert(o.m);
      if (o.m > max_m) max_m = o.m, max_pos = o.pos;
    }
    if (ms.size() < 2 || max_pos < W / 2) continue;
    if (!best || max_m > best_m) {
      CaseWitness w;
      w.kind = CaseWitness::Case::C;
      w.window = W;
      w.d = d;
      w.b = b;
      w.e = e;
      w.occurrences = occ;
      best = std::move(w);
      best_m = max_m;
    }
  }
  return best;
}

/// Classify a prefix of α_f into the trichotomy. Recurrence means "occurs in the
/// late half of the window"; the witness is certified only up to the window.
inline CaseWitness find_case(const std::vector<std::size_t>& alpha, std::size_t window, std::size_t max_len = 8) {
  const std::size_t W = std::min(window, alpha.size());
  if (W < 4) fail(ErrorKind::InconclusiveAtWindow, "window of " + std::to_string(W) + " blocks is too short");
  const std::size_t late = W / 2;
  std::set<std::size_t> rec(alpha.begin() + late, alpha.begin() + W);
  CaseWitness w;
  w.window = W;
  w.recurrent.assign(rec.begin(), rec.end());

  if (rec.size() == 1) {
    w.kind = CaseWitness::Case::B;
    w.k = *rec.begin();
    w.k_late_count = W - late;
    return w;
  }

  for (std::size_t L = 2; L <= max_len && late + L <= W; ++L) {
    std::map<std::vector<std::size_t>, std::set<std::vector<std::size_t>>> groups;
    for (std::size_t i = late; i + L <= W; ++i) {
      std::vector<std::size_t> fac(alpha.begin() + i, alpha.begin() + i + L);
      auto key = fac;
      std::sort(key.begin(), key.end());
      groups[key].insert(fac);
    }
    for (auto& [key, facs] : groups) {
      if (facs.size() < 2) continue;
      auto it = facs.begin();
      w.kind = CaseWitness::Case::A;
      w.sigma = *it++;
      w.tau = *it;
      std::vector<bool> used(L, false);
      for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < L; ++j)
          if (!used[j] && w.sigma[j] == w.tau[i]) {
            used[j] = true;
            w.h.push_back(j);
            break;
          }
      for (std::size_t i = late; i + L <= W; ++i) {
        if (std::equal(w.sigma.begin(), w.sigma.end(), alpha.begin() + i)) w.sigma_positions.push_back(i);
        if (std::equal(w.tau.begin(), w.tau.end(), alpha.begin() + i)) w.tau_positions.push_back(i);
      }
      return w;
    }
  }

  if (auto c = find_c_witness(alpha, W)) {
    c->recurrent = w.recurrent;
    return *c;
  }
  fail(ErrorKind::InconclusiveAtWindow, "no case witness within " + std::to_string(W) + " blocks");
}

// ---------------------------------------------------------------------------
// Classification.

enum class Verdict {
  IntrinsicallyComputable,
  NonQuasiBlockWitnessed,
  BlockFinitelyManyTypes,
  BlockInfinitelyManyTypes,
  QuasiBlockWithComputableBound,
  ProperQuasiBlockUnresolved,
  UnknownAtBound,
};

enum class TrivialKind { AlmostConstant, AlmostIdentity };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::IntrinsicallyComputable: return "IntrinsicallyComputable";
    case Verdict::NonQuasiBlockWitnessed: return "NonQuasiBlockWitnessed";
    case Verdict::BlockFinitelyManyTypes: return "BlockFinitelyManyTypes";
    case Verdict::BlockInfinitelyManyTypes: return "BlockInfinitelyManyTypes";
    case Verdict::QuasiBlockWithComputableBound: return "QuasiBlockWithComputableBound";
    case Verdict::ProperQuasiBlockUnresolved: return "ProperQuasiBlockUnresolved";
    case Verdict::UnknownAtBound: return "UnknownAtBound";
  }
  return "?";
}

inline const char* to_string(TrivialKind t) {
  return t == TrivialKind::AlmostConstant ? "almost-constant" : "almost-identity";
}

struct Classification {
  Verdict verdict = Verdict::UnknownAtBound;
  Nat bound = 0;
  std::string note;

  // IntrinsicallyComputable
  std::optional<TrivialKind> trivial;
  std::optional<Nat> last_exception;  // empty when there is no exception at all
  Nat constant = 0;

  // NonQuasiBlockWitnessed: every n in [window_start, bound] has m <= n with f(m) > n
  Nat window_start = 0;
  std::vector<std::pair<Nat, Nat>> witnesses;  // (n, m)

  // block verdicts
  std::optional<TypeTable> table;
  std::optional<CaseWitness> case_witness;
  std::vector<std::size_t> new_type_blocks;  // block index where each type first appears

  // QuasiBlockWithComputableBound
  std::string minorant;
  std::optional<Nat> last_cut;
};

namespace detail {

inline bool minorant_holds(const std::vector<Nat>& f, const FuncSpec& L, Nat bound) {
  Nat prev = 0;
  for (Nat n = 0; n <= bound; ++n) {
    Nat l = L(n);
    if (l > f[n] || l < prev) return false;
    prev = l;
  }
  return L(bound) > L(bound / 2);
}

}  // namespace detail

inline const std::vector<std::string>& minorant_catalog() {
  static const std::vector<std::string> c = {"sqrt(sqrt(n))", "sqrt(n/2)", "sqrt(n)", "n/2", "n"};
  return c;
}

/// Evidence-backed verdict about f on [0, bound]. Every verdict is "up to bound".
inline Classification classify(const FuncSpec& f, Nat bound) {
  if (bound < 8) fail(ErrorKind::InputError, "classify needs bound >= 8");
  const auto v = f.tabulate(bound);
  const Nat half = bound / 2;
  Classification c;
  c.bound = bound;

  auto last_where = [&](auto pred) -> std::optional<Nat> {
    for (Nat n = bound + 1; n-- > 0;)
      if (pred(n)) return n;
    return std::nullopt;
  };

  const Nat cval = v[bound];
  auto lc = last_where([&](Nat n) { return v[n] != cval; });
  if (!lc || *lc < half) {
    c.verdict = Verdict::IntrinsicallyComputable;
    c.trivial = TrivialKind::AlmostConstant;
    c.last_exception = lc;
    c.constant = cval;
    return c;
  }
  auto li = last_where([&](Nat n) { return v[n] != n; });
  if (!li || *li < half) {
    c.verdict = Verdict::IntrinsicallyComputable;
    c.trivial = TrivialKind::AlmostIdentity;
    c.last_exception = li;
    return c;
  }

  std::optional<Nat> last_cut;
  {
    Nat running = 0;
    for (Nat m = 0; m <= bound; ++m) {
      running = std::max(running, v[m]);
      if (running <= m) last_cut = m;
    }
  }
  c.last_cut = last_cut;
  if (!last_cut || *last_cut < half) {
    c.verdict = Verdict::NonQuasiBlockWitnessed;
    c.window_start = last_cut ? *last_cut + 1 : 0;
    Nat arg = 0;
    for (Nat n = 0; n <= bound; ++n) {
      if (v[n] > v[arg]) arg = n;
      if (n >= c.window_start) c.witnesses.emplace_back(n, arg);
    }
    return c;
  }

  TypeTable t = detail::tile(BlockScanner(v), std::nullopt);
  if (t.covered() > half && t.alpha.size() >= 4) {
    std::vector<bool> seen(t.types.size(), false);
    for (std::size_t i = 0; i < t.alpha.size(); ++i)
      if (!seen[t.alpha[i]]) {
        seen[t.alpha[i]] = true;
        c.new_type_blocks.push_back(i);
      }
    const Nat last_new_start = t.block_starts[c.new_type_blocks.back()];
    if (last_new_start <= t.covered() / 2) {
      try {
        c.case_witness = find_case(t.alpha, t.alpha.size());
        c.verdict = Verdict::BlockFinitelyManyTypes;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InconclusiveAtWindow) throw;
        c.verdict = Verdict::UnknownAtBound;
        c.note = e.what();
      }
    } else {
      c.verdict = Verdict::BlockInfinitelyManyTypes;
    }
    c.table = std::move(t);
    return c;
  }

  std::vector<std::string> candidates;
  if (auto d = f.declared_minorant()) candidates.push_back(*d);
  for (auto& m : minorant_catalog())
    if (std::find(candidates.begin(), candidates.end(), m) == candidates.end()) candidates.push_back(m);
  for (auto& m : candidates) {
    if (detail::minorant_holds(v, FuncSpec::expression(m, bound), bound)) {
      c.verdict = Verdict::QuasiBlockWithComputableBound;
      c.minorant = m;
      return c;
    }
  }
  c.verdict = Verdict::ProperQuasiBlockUnresolved;
  c.note = "cuts are cofinal up to bound but no catalog minorant diverges";
  return c;
}

/// Re-derive the evidence in c from fresh evaluations of f.
inline bool verify_evidence(const FuncSpec& f, const Classification& c) {
  const Nat bound = c.bound;
  const Nat half = bound / 2;
  switch (c.verdict) {
    case Verdict::IntrinsicallyComputable: {
      if (!c.trivial) return false;
      const Nat start = c.last_exception ? *c.last_exception + 1 : 0;
      if (start > half + 1) return false;
      for (Nat n = start; n <= bound; ++n) {
        Nat want = *c.trivial == TrivialKind::AlmostConstant ? c.constant : n;
        if (f(n) != want) return false;
      }
      if (c.last_exception) {
        Nat x = *c.last_exception;
        Nat want = *c.trivial == TrivialKind::AlmostConstant ? c.constant : x;
        if (f(x) == want) return false;
      }
      return true;
    }
    case Verdict::NonQuasiBlockWitnessed: {
      if (c.window_start > half) return false;
      if (c.witnesses.size() != bound - c.window_start + 1) return false;
      Nat expect = c.window_start;
      for (auto [n, m] : c.witnesses) {
        if (n != expect++ || m > n || f(m) <= n) return false;
      }
      return true;
    }
    case Verdict::BlockFinitelyManyTypes:
    case Verdict::BlockInfinitelyManyTypes: {
      if (!c.table) return false;
      auto fresh = alpha_within(f, bound);
      if (fresh.alpha != c.table->alpha || fresh.types != c.table->types) return false;
      if (c.verdict == Verdict::BlockFinitelyManyTypes) {
        if (!c.case_witness) return false;
        auto again = find_case(fresh.alpha, c.case_witness->window);
        return again.kind == c.case_witness->kind;
      }
      return true;
    }
    case Verdict::QuasiBlockWithComputableBound: {
      auto v = f.tabulate(bound);
      if (!detail::minorant_holds(v, FuncSpec::expression(c.minorant, bound), bound)) return false;
      auto cuts = quasi_block_cuts(f, bound);
      return !cuts.empty() && cuts.back() >= half;
    }
    case Verdict::ProperQuasiBlockUnresolved: {
      auto cuts = quasi_block_cuts(f, bound);
      return !cuts.empty() && cuts.back() >= half;
    }
    case Verdict::UnknownAtBound: return true;
  }
  return false;
}

}  // namespace omega_spectra
