#pragma once

#include <cmath>
#include <utility>

#include "error.hpp"

namespace omega_spectra {

// Cantor pairing: <x,y> = (x+y)(x+y+1)/2 + y.
constexpr Nat pair_encode(Nat x, Nat y) {
  const Nat w = x + y;
  return w * (w + 1) / 2 + y;
}

inline std::pair<Nat, Nat> pair_decode(Nat n) {
  // largest w with w(w+1)/2 <= n
  Nat w = static_cast<Nat>((std::sqrt(8.0L * static_cast<long double>(n) + 1.0L) - 1.0L) / 2.0L);
  while (w * (w + 1) / 2 > n) --w;
  while ((w + 1) * (w + 2) / 2 <= n) ++w;
  const Nat y = n - w * (w + 1) / 2;
  return {w - y, y};
}

}  // namespace omega_spectra
