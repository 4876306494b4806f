#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "func_spec.hpp"

namespace omega_spectra {

/// A finite interval [lo, hi] closed under f and f^-1, with f stored relative to lo.
struct FBlock {
  Nat lo = 0;
  Nat hi = 0;
  std::vector<Nat> offsets;  // offsets[i] = f(lo + i) - lo

  std::size_t size() const { return offsets.size(); }
  bool contains(Nat x) const { return x >= lo && x <= hi; }
  Nat value(Nat x) const { return lo + offsets.at(x - lo); }

  /// Canonical shape: the block translated to base 0.
  const std::vector<Nat>& shape() const { return offsets; }

  static FBlock from_shape(std::vector<Nat> shape, Nat lo = 0) {
    if (shape.empty()) fail(ErrorKind::InputError, "empty block shape");
    for (Nat v : shape)
      if (v >= shape.size()) fail(ErrorKind::InputError, "block shape maps outside itself");
    FBlock b;
    b.lo = lo;
    b.hi = lo + shape.size() - 1;
    b.offsets = std::move(shape);
    return b;
  }

  bool operator==(const FBlock&) const = default;
};

enum class Closure { Closed, Escapes, UnknownAtBound };

inline const char* to_string(Closure c) {
  switch (c) {
    case Closure::Closed: return "closed";
    case Closure::Escapes: return "escapes";
    case Closure::UnknownAtBound: return "unknown-at-bound";
  }
  return "?";
}

struct ClosureResult {
  Closure status = Closure::Closed;
  std::optional<FBlock> block;
  Nat witness = 0;  // element whose image (or the interval end) left [0, bound]
};

/// Closure queries against f tabulated on [0, bound]. Preimages are only known
/// inside the tabulated range, so a closure that reaches `bound` is reported as
/// unknown rather than closed.
class BlockScanner {
 public:
  explicit BlockScanner(std::vector<Nat> values) : f_(std::move(values)) {
    if (f_.empty()) fail(ErrorKind::InputError, "block scanner needs at least one value");
    const std::size_t n = f_.size();
    min_pre_.assign(n, kNone);
    max_pre_.assign(n, kNone);
    for (std::size_t x = 0; x < n; ++x) {
      const Nat y = f_[x];
      if (y < n) {
        if (min_pre_[y] == kNone) min_pre_[y] = x;
        max_pre_[y] = x;
      }
    }
  }

  BlockScanner(const FuncSpec& f, Nat bound) : BlockScanner(f.tabulate(bound)) {}

  Nat bound() const { return f_.size() - 1; }
  const std::vector<Nat>& values() const { return f_; }

  ClosureResult scan(Nat a) const {
    const Nat bnd = bound();
    if (a > bnd) fail(ErrorKind::InputError, "seed " + std::to_string(a) + " beyond bound " + std::to_string(bnd));
    Nat lo = a, hi = a;
    auto visit = [&](Nat x) {
      const Nat y = f_[x];
      if (y > bnd) return false;
      lo = std::min(lo, y);
      hi = std::max(hi, y);
      if (min_pre_[x] != kNone) {
        lo = std::min(lo, min_pre_[x]);
        hi = std::max(hi, max_pre_[x]);
      }
      return true;
    };
    if (!visit(a)) return {Closure::Escapes, std::nullopt, a};
    Nat done_lo = a, done_hi = a;  // [done_lo, done_hi] already visited
    while (lo < done_lo || hi > done_hi) {
      while (lo < done_lo)
        if (!visit(--done_lo)) return {Closure::Escapes, std::nullopt, done_lo};
      while (hi > done_hi)
        if (!visit(++done_hi)) return {Closure::Escapes, std::nullopt, done_hi};
    }
    if (hi == bnd) return {Closure::UnknownAtBound, std::nullopt, hi};
    FBlock b;
    b.lo = lo;
    b.hi = hi;
    b.offsets.reserve(hi - lo + 1);
    for (Nat x = lo; x <= hi; ++x) b.offsets.push_back(f_[x] - lo);
    return {Closure::Closed, std::move(b), 0};
  }

  FBlock block_of(Nat a) const {
    auto r = scan(a);
    if (r.status != Closure::Closed)
      fail(ErrorKind::NotClosedWithinBound,
           "block of " + std::to_string(a) + " " + to_string(r.status) + " (witness " + std::to_string(r.witness) + ")");
    return *r.block;
  }

  /// [0, m] closed under f (f only, not f^-1).
  bool is_cut(Nat m) const {
    for (Nat x = 0; x <= m; ++x)
      if (f_[x] > m) return false;
    return true;
  }

 private:
  static constexpr Nat kNone = static_cast<Nat>(-1);
  std::vector<Nat> f_;
  std::vector<Nat> min_pre_, max_pre_;
};

inline FBlock block_of(const FuncSpec& f, Nat a, Nat bound) {
  if (a > bound) fail(ErrorKind::InputError, "block_of: a > bound");
  return BlockScanner(f, bound).block_of(a);
}

inline bool iso_type(const FBlock& b1, const FBlock& b2) { return b1.offsets == b2.offsets; }

namespace detail {

// Backtracking over strictly increasing maps p with p(f1(i)) = f2(p(i)).
// When f1(i) > i the image of f1(i) is forced ahead of time.
class EmbeddingSearch {
 public:
  EmbeddingSearch(const std::vector<Nat>& f1, const std::vector<Nat>& f2)
      : f1_(f1), f2_(f2), p_(f1.size(), kUnset), forced_(f1.size(), kUnset) {}

  bool run() { return f1_.size() <= f2_.size() && extend(0, 0); }

 private:
  static constexpr Nat kUnset = static_cast<Nat>(-1);
  const std::vector<Nat>& f1_;
  const std::vector<Nat>& f2_;
  std::vector<Nat> p_;
  std::vector<Nat> forced_;

  bool extend(std::size_t i, Nat min_j) {
    const std::size_t n1 = f1_.size(), n2 = f2_.size();
    if (i == n1) return true;
    const Nat max_j = n2 - (n1 - i);  // leave room for the rest
    Nat lo = min_j, hi = max_j;
    if (forced_[i] != kUnset) {
      if (forced_[i] < min_j || forced_[i] > max_j) return false;
      lo = hi = forced_[i];
    }
    for (Nat j = lo; j <= hi; ++j) {
      if (!compatible(i, j)) continue;
      p_[i] = j;
      Nat target = f1_[i];
      bool set_force = false;
      if (target > i) {
        if (forced_[target] == kUnset) {
          forced_[target] = f2_[j];
          set_force = true;
        } else if (forced_[target] != f2_[j]) {
          p_[i] = kUnset;
          continue;
        }
      }
      if (extend(i + 1, j + 1)) return true;
      if (set_force) forced_[target] = kUnset;
      p_[i] = kUnset;
    }
    return false;
  }

  bool compatible(std::size_t i, Nat j) const {
    const Nat t = f1_[i];
    if (t == i) return f2_[j] == j;
    if (t < i) return p_[t] == f2_[j];
    return f2_[j] > j;
  }
};

}  // namespace detail

/// True iff some order-preserving injection carries b1's function into b2's.
inline bool embeds(const FBlock& b1, const FBlock& b2) {
  return detail::EmbeddingSearch(b1.offsets, b2.offsets).run();
}

}  // namespace omega_spectra
