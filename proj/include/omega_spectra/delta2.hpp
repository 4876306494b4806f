#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "error.hpp"

namespace omega_spectra {

/// Desk-scale Δ₂ approximation: an initial bit and a finite list of toggle
/// stages per declared index. A flip at stage t means ξ(k,t) != ξ(k,t-1).
class DeltaTwoApprox {
 public:
  DeltaTwoApprox() = default;

  void declare(Nat k, bool initial, std::vector<Nat> flips = {}) {
    std::sort(flips.begin(), flips.end());
    if (std::adjacent_find(flips.begin(), flips.end()) != flips.end())
      fail(ErrorKind::InputError, "duplicate flip stage for index " + std::to_string(k));
    initial_[k] = initial;
    flips_[k] = std::move(flips);
  }

  bool declared(Nat k) const { return initial_.count(k) != 0; }

  /// Indices are expected to form an initial segment 0..size()-1.
  std::size_t size() const { return initial_.size(); }

  Nat domain_end() const {
    Nat k = 0;
    while (declared(k)) ++k;
    return k;
  }

  bool initial(Nat k) const { return initial_.at(check(k)); }
  const std::vector<Nat>& flips(Nat k) const { return flips_.at(check(k)); }

  bool approx_at(Nat k, Nat s) const {
    const auto& f = flips(k);
    auto count = std::upper_bound(f.begin(), f.end(), s) - f.begin();
    return initial(k) ^ (count % 2 == 1);
  }

  bool limit_value(Nat k) const { return initial(k) ^ (flips(k).size() % 2 == 1); }

  /// Stage of the last flip of k (0 when k never flips).
  Nat last_flip(Nat k) const {
    const auto& f = flips(k);
    return f.empty() ? 0 : f.back();
  }

  std::size_t flip_count(Nat k) const { return flips(k).size(); }

  const std::map<Nat, bool>& initial_bits() const { return initial_; }
  const std::map<Nat, std::vector<Nat>>& flip_table() const { return flips_; }

 private:
  std::map<Nat, bool> initial_;
  std::map<Nat, std::vector<Nat>> flips_;

  Nat check(Nat k) const {
    if (!declared(k)) fail(ErrorKind::InputError, "approximation has no declared history for index " + std::to_string(k));
    return k;
  }
};

}  // namespace omega_spectra
