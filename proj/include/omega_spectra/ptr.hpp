#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "analysis.hpp"
#include "error.hpp"
#include "presentation.hpp"

namespace omega_spectra {

/// The standard model (ω,<,f) on a finite window, cut into consecutive units.
/// A unit is a single point (symbol = its f-value) or a whole f-block (symbol = type).
struct UnitString {
  std::vector<std::size_t> symbol;
  std::vector<Nat> start;   // start[u] is the first position of unit u; one sentinel at the end
  std::vector<Nat> values;  // f on [0, positions())

  std::size_t units() const { return symbol.size(); }
  Nat positions() const { return start.back(); }
  Nat begin(std::size_t u) const { return start.at(u); }
  Nat end(std::size_t u) const { return start.at(u + 1); }
  Nat size(std::size_t u) const { return end(u) - begin(u); }

  std::size_t unit_of(Nat p) const {
    if (p >= positions()) return units();
    return static_cast<std::size_t>(std::upper_bound(start.begin(), start.end(), p) - start.begin()) - 1;
  }
  bool boundary(Nat p) const { return p == positions() || begin(unit_of(p)) == p; }

  static UnitString points(std::vector<Nat> values) {
    UnitString s;
    s.symbol.reserve(values.size());
    for (std::size_t p = 0; p <= values.size(); ++p) s.start.push_back(p);
    for (Nat v : values) s.symbol.push_back(static_cast<std::size_t>(v));
    s.values = std::move(values);
    return s;
  }

  static UnitString blocks(const TypeTable& t) {
    UnitString s;
    s.symbol = t.alpha;
    s.start = t.block_starts;
    s.start.push_back(t.covered());
    for (std::size_t i = 0; i < t.alpha.size(); ++i)
      for (Nat v : t.types[t.alpha[i]]) s.values.push_back(t.block_starts[i] + v);
    return s;
  }
};

// ---------------------------------------------------------------------------

struct Interleave {
  std::vector<std::vector<std::size_t>> fillers;  // tau_0 .. tau_{m-1}
  std::vector<std::size_t> positions;             // where each sigma(i) was matched
  std::size_t end = 0;                            // one past the last match
};

/// Earliest-match interleaving of sigma into alpha starting at `from`.
inline Interleave interleave_search(const std::vector<std::size_t>& alpha, const std::vector<std::size_t>& sigma, std::size_t from,
                                    std::size_t window = std::numeric_limits<std::size_t>::max()) {
  const std::size_t W = std::min(window, alpha.size());
  Interleave r;
  std::size_t cur = from;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    std::size_t p = cur;
    while (p < W && alpha[p] != sigma[i]) ++p;
    if (p >= W) fail(ErrorKind::SearchBudgetExceeded, "symbol " + std::to_string(sigma[i]) + " not found in window of " + std::to_string(W));
    r.fillers.emplace_back(alpha.begin() + cur, alpha.begin() + p);
    r.positions.push_back(p);
    cur = p + 1;
  }
  r.end = cur;
  return r;
}

/// Earliest occurrence of `word` in alpha at or after `from`.
inline std::optional<std::size_t> find_factor(const std::vector<std::size_t>& alpha, const std::vector<std::size_t>& word, std::size_t from) {
  if (word.empty()) return from;
  for (std::size_t p = from; p + word.size() <= alpha.size(); ++p)
    if (std::equal(word.begin(), word.end(), alpha.begin() + p)) return p;
  return std::nullopt;
}

// ---------------------------------------------------------------------------

/// Hands out fresh odd numbers in increasing order.
class FreshSupplier {
 public:
  explicit FreshSupplier(Nat first = 1, Nat limit = std::numeric_limits<Nat>::max() - 1) : next_(first | 1), limit_(limit) {}
  Nat take() {
    if (next_ > limit_) fail(ErrorKind::FreshSupplierExhausted, "no fresh odd number below " + std::to_string(limit_));
    Nat x = next_;
    next_ += 2;
    return x;
  }
  Nat peek() const { return next_; }

 private:
  Nat next_, limit_;
};

/// Where a group of elements goes: the units [unit_lo, unit_hi] and, for every position
/// in them, the index of the old element placed there (empty = a fresh companion).
struct Placement {
  std::size_t unit_lo = 0, unit_hi = 0;
  std::vector<std::optional<std::size_t>> slots;
  std::optional<std::size_t> exponent;  // length of the b-run for stretched d b^m e groups
};

using Placer = std::function<std::optional<Placement>(const UnitString&, std::size_t from_unit)>;

struct TargetCondition {
  std::string description;
  Placer place;
  /// Checked on the result: pres is the new presentation, group the C region in order.
  std::function<bool(const FinitePresentation&, const std::vector<Nat>& group)> holds;
};

/// B = [0, b_end), C = [b_end, c_end), D = [c_end, size) as element indices.
/// D is re-placed unit by unit; a D group keeps its units together (rigid copy of
/// its type word unless a placer is given).
struct PtrSplit {
  struct Group {
    std::size_t lo = 0, hi = 0;  // element index range [lo, hi) inside D
    Placer place;                // empty: rigid copy
  };
  std::size_t b_end = 0, c_end = 0;
  std::vector<Group> d_groups;
};

struct PtrResult {
  std::vector<Nat> order;
  std::vector<Nat> fillers;  // fresh elements outside every group
  std::vector<Nat> c_group;  // C region in order, old and new
  std::vector<Nat> c_new;
  std::optional<std::size_t> c_exponent;
  std::vector<std::vector<Nat>> d_group_new;
  std::vector<std::optional<std::size_t>> d_group_exponent;
  std::size_t c_unit_lo = 0, c_unit_hi = 0;
};

namespace detail {

inline Placement rigid_placement(std::size_t u, std::size_t n_units, const UnitString& src) {
  Placement p;
  p.unit_lo = u;
  p.unit_hi = u + n_units - 1;
  for (std::size_t i = 0; i < src.end(p.unit_hi) - src.begin(u); ++i) p.slots.push_back(i);
  return p;
}

inline void check_placement(const Placement& p, const UnitString& src, std::size_t from, std::size_t n_old, const char* what) {
  if (p.unit_lo < from || p.unit_hi < p.unit_lo || p.unit_hi >= src.units())
    fail(ErrorKind::InternalInvariantViolation, std::string(what) + ": placement outside the allowed units");
  if (p.slots.size() != src.end(p.unit_hi) - src.begin(p.unit_lo))
    fail(ErrorKind::InternalInvariantViolation, std::string(what) + ": slot count differs from region size");
  std::size_t next = 0;
  for (auto& s : p.slots)
    if (s) {
      if (*s != next) fail(ErrorKind::InternalInvariantViolation, std::string(what) + ": old elements out of order");
      ++next;
    }
  if (next != n_old) fail(ErrorKind::InternalInvariantViolation, std::string(what) + ": not every old element is placed");
}

}  // namespace detail

/// Rigid placement of a type word at its earliest occurrence.
inline Placer rigid_placer(std::vector<std::size_t> word) {
  return [word = std::move(word)](const UnitString& src, std::size_t from) -> std::optional<Placement> {
    auto p = find_factor(src.symbol, word, from);
    if (!p) return std::nullopt;
    return detail::rigid_placement(*p, word.size(), src);
  };
}

/// Lay out `old` (possibly empty) plus fresh companions according to a placement starting
/// at unit `from`, with fresh fillers for the skipped units. Appends to `order`.
struct GroupPlacement {
  std::vector<Nat> fillers, group, fresh;
  Placement where;
};

inline GroupPlacement place_group(std::vector<Nat>& order, const UnitString& src, std::size_t from, const Placer& placer,
                                  const std::vector<Nat>& old, FreshSupplier& fresh, const std::string& what) {
  auto p = placer(src, from);
  if (!p) fail(ErrorKind::UnsatisfiableWithinWindow, what + ": no placement in the source window after unit " + std::to_string(from));
  detail::check_placement(*p, src, from, old.size(), what.c_str());
  GroupPlacement g;
  for (Nat pos = src.begin(from); pos < src.begin(p->unit_lo); ++pos) {
    Nat x = fresh.take();
    g.fillers.push_back(x);
    order.push_back(x);
  }
  for (auto& s : p->slots) {
    Nat x;
    if (s) {
      x = old[*s];
    } else {
      x = fresh.take();
      g.fresh.push_back(x);
    }
    g.group.push_back(x);
    order.push_back(x);
  }
  g.where = std::move(*p);
  return g;
}

/// Pushing to the right: keep B, relocate C to satisfy the target, re-place D so its
/// values survive, filling the gaps with fresh odd numbers.
inline PtrResult ptr_apply(const std::vector<Nat>& elements, const PtrSplit& split, const TargetCondition& target, const UnitString& src,
                           FreshSupplier& fresh) {
  const std::size_t n = elements.size();
  if (split.b_end > split.c_end || split.c_end > n) fail(ErrorKind::InputError, "ptr: split out of range");
  if (n > src.positions()) fail(ErrorKind::InputError, "ptr: presentation longer than the source window");
  if (!src.boundary(split.b_end) || !src.boundary(split.c_end) || !src.boundary(n))
    fail(ErrorKind::InputError, "ptr: split does not fall on unit boundaries");

  PtrResult r;
  r.order.assign(elements.begin(), elements.begin() + split.b_end);
  std::size_t cursor = src.unit_of(split.b_end);

  if (split.c_end > split.b_end) {
    std::vector<Nat> c(elements.begin() + split.b_end, elements.begin() + split.c_end);
    auto g = place_group(r.order, src, cursor, target.place, c, fresh, "target " + target.description);
    r.fillers = std::move(g.fillers);
    r.c_group = std::move(g.group);
    r.c_new = std::move(g.fresh);
    r.c_exponent = g.where.exponent;
    r.c_unit_lo = g.where.unit_lo;
    r.c_unit_hi = g.where.unit_hi;
    cursor = g.where.unit_hi + 1;
  }

  // D: walk its units, honoring groups.
  std::vector<const PtrSplit::Group*> groups;
  for (auto& gr : split.d_groups) {
    if (gr.lo < split.c_end || gr.hi > n || gr.lo >= gr.hi || !src.boundary(gr.lo) || !src.boundary(gr.hi))
      fail(ErrorKind::InputError, "ptr: malformed D group");
    groups.push_back(&gr);
  }
  std::sort(groups.begin(), groups.end(), [](auto a, auto b) { return a->lo < b->lo; });
  for (std::size_t i = 1; i < groups.size(); ++i)
    if (groups[i]->lo < groups[i - 1]->hi) fail(ErrorKind::InputError, "ptr: overlapping D groups");
  r.d_group_new.resize(split.d_groups.size());
  r.d_group_exponent.resize(split.d_groups.size());

  std::size_t gi = 0;
  Nat pos = split.c_end;
  while (pos < n) {
    const PtrSplit::Group* gr = gi < groups.size() && groups[gi]->lo == pos ? groups[gi] : nullptr;
    const Nat lo = pos, hi = gr ? gr->hi : src.end(src.unit_of(pos));
    std::vector<Nat> old(elements.begin() + lo, elements.begin() + hi);
    Placer placer;
    if (gr && gr->place) {
      placer = gr->place;
    } else {
      std::vector<std::size_t> word;
      for (std::size_t u = src.unit_of(lo); u < src.unit_of(hi); ++u) word.push_back(src.symbol[u]);
      placer = rigid_placer(std::move(word));
    }
    auto g = place_group(r.order, src, cursor, placer, old, fresh, "D segment at " + std::to_string(lo));
    r.fillers.insert(r.fillers.end(), g.fillers.begin(), g.fillers.end());
    if (gr) {
      auto idx = static_cast<std::size_t>(gr - split.d_groups.data());
      r.d_group_new[idx] = g.fresh;
      r.d_group_exponent[idx] = g.where.exponent;
      ++gi;
    } else if (!g.fresh.empty()) {
      fail(ErrorKind::InternalInvariantViolation, "ptr: rigid D unit received companions");
    }
    cursor = g.where.unit_hi + 1;
    pos = hi;
  }
  return r;
}

/// Every PtR postcondition, checked from scratch. Returns human-readable violations.
inline std::vector<std::string> ptr_check(const std::vector<Nat>& before, const PtrSplit& split, const PtrResult& r,
                                          const TargetCondition& target, const UnitString& src, bool odd_fresh = true) {
  std::vector<std::string> bad;
  auto pres_before = FinitePresentation::induced(before, src.values);
  auto pres_after = FinitePresentation::induced(r.order, src.values);

  if (!std::equal(before.begin(), before.begin() + split.b_end, r.order.begin())) bad.push_back("B is not an unchanged prefix");
  if (!pres_after.extends_in_order(pres_before)) bad.push_back("old elements changed relative order or vanished");

  std::unordered_set<Nat> old(before.begin(), before.end());
  for (std::size_t i = 0; i < r.order.size(); ++i) {
    Nat x = r.order[i];
    if (old.count(x)) continue;
    if (odd_fresh && x % 2 == 0) bad.push_back("fresh element " + std::to_string(x) + " is even");
    if (i < split.b_end) bad.push_back("fresh element " + std::to_string(x) + " inside B");
  }

  for (std::size_t i = 0; i < before.size(); ++i) {
    if (i >= split.b_end && i < split.c_end) continue;
    Nat x = before[i];
    if (pres_before.f_value(x) != pres_after.f_value(x)) bad.push_back("value of " + std::to_string(x) + " changed");
  }

  if (split.c_end > split.b_end) {
    if (r.c_group.empty()) {
      bad.push_back("C vanished");
    } else {
      std::size_t p0 = pres_after.position(r.c_group.front());
      for (std::size_t k = 0; k < r.c_group.size(); ++k)
        if (p0 + k >= r.order.size() || r.order[p0 + k] != r.c_group[k]) {
          bad.push_back("C is not contiguous");
          break;
        }
      std::unordered_set<Nat> in_group(r.c_group.begin(), r.c_group.end());
      for (std::size_t i = split.b_end; i < split.c_end; ++i)
        if (!in_group.count(before[i])) bad.push_back("C element " + std::to_string(before[i]) + " left its group");
      for (Nat x : r.c_group)
        if (!old.count(x) && std::find(r.c_new.begin(), r.c_new.end(), x) == r.c_new.end())
          bad.push_back("unrecorded companion " + std::to_string(x));
      if (target.holds && !target.holds(pres_after, r.c_group)) bad.push_back("target '" + target.description + "' fails");
    }
  }
  return bad;
}

// ---------------------------------------------------------------------------
// Target conditions used by the constructions.

/// C = {x}: x must land on a point whose f-value is `value` (a position inside B).
inline TargetCondition value_target(Nat value) {
  TargetCondition t;
  t.description = "f(C) = position " + std::to_string(value);
  t.place = [value](const UnitString& src, std::size_t from) -> std::optional<Placement> {
    for (std::size_t u = from; u < src.units(); ++u)
      if (src.symbol[u] == value && src.size(u) == 1) return detail::rigid_placement(u, 1, src);
    return std::nullopt;
  };
  t.holds = [value](const FinitePresentation& p, const std::vector<Nat>& g) {
    return g.size() == 1 && value < p.size() && p.f_value(g[0]) == p.element(value);
  };
  return t;
}

/// C occupies exactly a copy of the block word `word`.
inline TargetCondition shape_target(std::vector<std::size_t> word, const UnitString* src) {
  TargetCondition t;
  t.description = "C is a copy of a fixed block word";
  t.place = rigid_placer(word);
  t.holds = [word, src](const FinitePresentation& p, const std::vector<Nat>& g) {
    if (g.empty()) return false;
    Nat lo = p.position(g.front()), hi = lo + g.size();
    if (!src->boundary(lo) || !src->boundary(hi)) return false;
    std::vector<std::size_t> got;
    for (std::size_t u = src->unit_of(lo); u < src->unit_of(hi); ++u) got.push_back(src->symbol[u]);
    return got == word;
  };
  return t;
}

enum class BlockEnd { Left, Right };

/// True iff element x sits at the given end of a unit of type k.
inline bool at_block_end(const FinitePresentation& p, const UnitString& src, Nat x, std::size_t k, BlockEnd end) {
  Nat pos = p.position(x);
  std::size_t u = src.unit_of(pos);
  if (u >= src.units() || src.symbol[u] != k) return false;
  return end == BlockEnd::Left ? pos == src.begin(u) : pos + 1 == src.end(u);
}

/// C moved rigidly so that its element at `offset` (the anchor) sits at the given end
/// of a k-unit; fresh companions complete the partial units at both ends.
inline TargetCondition position_target(std::size_t k, std::size_t offset, std::size_t c_size, BlockEnd end, bool all_k, const UnitString* src,
                                       Nat anchor) {
  TargetCondition t;
  t.description = std::string("anchor at the ") + (end == BlockEnd::Left ? "left" : "right") + " end of a type-" + std::to_string(k) + " block";
  t.place = [=](const UnitString& s, std::size_t from) -> std::optional<Placement> {
    for (std::size_t u = from; u < s.units(); ++u) {
      if (s.symbol[u] != k) continue;
      Nat a = end == BlockEnd::Left ? s.begin(u) : s.end(u) - 1;
      if (a < s.begin(from) + offset) continue;
      Nat P = a - offset;
      if (P + c_size > s.positions()) return std::nullopt;
      Placement p;
      p.unit_lo = s.unit_of(P);
      p.unit_hi = s.unit_of(P + c_size - 1);
      bool ok = true;
      for (std::size_t v = p.unit_lo; v <= p.unit_hi && all_k; ++v) ok = ok && s.symbol[v] == k;
      if (!ok) continue;
      for (Nat q = s.begin(p.unit_lo); q < s.end(p.unit_hi); ++q)
        p.slots.push_back(q >= P && q < P + c_size ? std::optional<std::size_t>(q - P) : std::nullopt);
      return p;
    }
    return std::nullopt;
  };
  t.holds = [=](const FinitePresentation& p, const std::vector<Nat>&) { return at_block_end(p, *src, anchor, k, end); };
  return t;
}

/// A d b^m e group re-placed at the earliest occurrence with m > m_min. The old layout
/// is d-block, b-run (m_old >= 1 copies), e-block; the element at run offset `anchor`
/// goes to the least run offset >= anchor at the requested end of a b-block, and fresh
/// companions fill the rest of the run.
struct StretchSpec {
  std::size_t d = 0, b = 0, e = 0;
  std::size_t m_old = 0;
  std::size_t m_min = 0;  // the new exponent must exceed this
  std::size_t anchor = 0;
  std::optional<BlockEnd> end;  // empty: keep the anchor offset
};

inline std::optional<std::pair<std::size_t, std::size_t>> find_run(const UnitString& src, std::size_t d, std::size_t b, std::size_t e,
                                                                   std::size_t m_min, std::size_t from) {
  const auto& a = src.symbol;
  for (std::size_t i = from; i + 2 < a.size(); ++i) {
    if (a[i] != d || a[i + 1] != b) continue;
    std::size_t j = i + 1;
    while (j < a.size() && a[j] == b) ++j;
    if (j < a.size() && a[j] == e && j - i - 1 > m_min) return std::make_pair(i, j - i - 1);
  }
  return std::nullopt;
}

inline Placer stretch_placer(StretchSpec spec, Nat size_d, Nat size_b, Nat size_e) {
  return [=](const UnitString& src, std::size_t from) -> std::optional<Placement> {
    auto occ = find_run(src, spec.d, spec.b, spec.e, spec.m_min, from);
    if (!occ) return std::nullopt;
    auto [i, m] = *occ;
    Nat target = spec.anchor;
    if (spec.end) {
      Nat want = *spec.end == BlockEnd::Left ? 0 : size_b - 1;
      while (target % size_b != want) ++target;
    }
    const Nat old_run = spec.m_old * size_b, new_run = m * size_b;
    if (target >= new_run || new_run - target < old_run - spec.anchor) return std::nullopt;
    Placement p;
    p.unit_lo = i;
    p.unit_hi = i + m + 1;
    p.exponent = m;
    std::size_t idx = 0;
    for (Nat k = 0; k < size_d; ++k) p.slots.push_back(idx++);
    for (Nat k = 0; k < new_run; ++k) {
      bool old_before = k < spec.anchor;
      bool is_anchor = k == target;
      bool old_after = k > target && k - target < old_run - spec.anchor;
      p.slots.push_back(old_before || is_anchor || old_after ? std::optional<std::size_t>(idx++) : std::nullopt);
    }
    for (Nat k = 0; k < size_e; ++k) p.slots.push_back(idx++);
    return p;
  };
}

}  // namespace omega_spectra
