#pragma once

// Eigenfunction labels of the right-angled isosceles triangle
// D = {0 <= y <= x <= pi}: phi_{m,n} = sin(mx)sin(ny) - sin(nx)sin(my),
// eigenvalue m^2 + n^2, m > n >= 1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "trinodal/error.hpp"

namespace trinodal {

// Largest admissible eigenvalue cutoff; keeps m^2 + n^2 inside int64.
inline constexpr std::int64_t kMaxLambda = std::int64_t{1} << 62;

struct ModePair {
  std::int64_t m = 2;
  std::int64_t n = 1;

  constexpr std::int64_t lambda() const { return m * m + n * n; }

  friend constexpr bool operator==(const ModePair&, const ModePair&) = default;
};

inline std::string to_string(const ModePair& mode) {
  return "(" + std::to_string(mode.m) + "," + std::to_string(mode.n) + ")";
}

inline constexpr bool is_valid(const ModePair& mode) {
  return mode.n >= 1 && mode.m > mode.n && mode.m <= (std::int64_t{1} << 31);
}

inline void require_valid(const ModePair& mode) {
  if (!is_valid(mode)) {
    throw invalid_input("invalid mode " + to_string(mode) + ": need m > n >= 1");
  }
}

inline ModePair make_mode(std::int64_t m, std::int64_t n) {
  ModePair mode{m, n};
  require_valid(mode);
  return mode;
}

// gcd(m,n) = 1 and m + n odd: the nodal pattern does not split into tiles.
inline bool is_nontiling(const ModePair& mode) {
  require_valid(mode);
  return std::gcd(mode.m, mode.n) == 1 && (mode.m + mode.n) % 2 == 1;
}

struct Reduction {
  ModePair original;
  ModePair reduced;
  std::int64_t tiles = 1;
  std::int64_t gcd = 1;        // d; contributes d^2 tiles
  bool parity_step = false;    // contributes a factor 2
};

// gcd division first, then at most one parity step. With gcd 1 and even sum
// both m, n are odd, so ((m+n)/2, (m-n)/2) has odd sum and gcd 1.
inline Reduction reduce(const ModePair& mode) {
  require_valid(mode);
  Reduction r;
  r.original = mode;
  r.gcd = std::gcd(mode.m, mode.n);
  ModePair cur{mode.m / r.gcd, mode.n / r.gcd};
  r.tiles = r.gcd * r.gcd;
  if ((cur.m + cur.n) % 2 == 0) {
    cur = ModePair{(cur.m + cur.n) / 2, (cur.m - cur.n) / 2};
    r.tiles *= 2;
    r.parity_step = true;
  }
  r.reduced = cur;
  if (!is_nontiling(cur)) {
    throw invariant_violation("reduction of " + to_string(mode) + " left a tiling pair");
  }
  return r;
}

struct SpectralEntry {
  std::int64_t index = 0;  // N, from 1
  ModePair mode;
  std::int64_t lambda() const { return mode.lambda(); }
};

// (lambda, n) lexicographic order.
inline bool spectral_less(const ModePair& a, const ModePair& b) {
  const auto la = a.lambda();
  const auto lb = b.lambda();
  return la != lb ? la < lb : a.n < b.n;
}

struct SpectralSequence {
  std::int64_t max_lambda = 0;
  std::vector<SpectralEntry> entries;
};

namespace detail {

inline std::int64_t isqrt(std::int64_t v) {
  if (v <= 0) return 0;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(v)));
  while (r > 0 && r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

inline void check_cutoff(std::int64_t max_lambda) {
  if (max_lambda > kMaxLambda) {
    throw invalid_input("lambda cutoff exceeds 2^62");
  }
}

}  // namespace detail

// Number of admissible pairs with m^2 + n^2 <= bound; this is N(lambda).
inline std::int64_t count_modes_upto(std::int64_t bound) {
  detail::check_cutoff(bound);
  std::int64_t total = 0;
  for (std::int64_t n = 1; 2 * n * n + 2 * n + 1 <= bound; ++n) {
    const std::int64_t mmax = detail::isqrt(bound - n * n);
    if (mmax > n) total += mmax - n;
  }
  return total;
}

// All pairs with lambda in [lo, hi], sorted in spectral order.
inline std::vector<ModePair> modes_in_range(std::int64_t lo, std::int64_t hi) {
  detail::check_cutoff(hi);
  std::vector<ModePair> out;
  if (hi < lo || hi < 5) return out;
  lo = std::max<std::int64_t>(lo, 5);
  for (std::int64_t n = 1; 2 * n * n + 2 * n + 1 <= hi; ++n) {
    std::int64_t mmin = n + 1;
    if (lo - n * n > mmin * mmin) {
      mmin = std::max(mmin, detail::isqrt(lo - n * n - 1) + 1);
    }
    const std::int64_t mmax = detail::isqrt(hi - n * n);
    for (std::int64_t m = mmin; m <= mmax; ++m) out.push_back(ModePair{m, n});
  }
  std::sort(out.begin(), out.end(), spectral_less);
  return out;
}

inline SpectralSequence enumerate_spectrum(std::int64_t max_lambda) {
  if (max_lambda < 5) {
    throw invalid_input("lambda cutoff " + std::to_string(max_lambda) +
                        " is below the ground state 5");
  }
  SpectralSequence seq;
  seq.max_lambda = max_lambda;
  auto modes = modes_in_range(5, max_lambda);
  seq.entries.reserve(modes.size());
  std::int64_t index = 1;
  for (const auto& mode : modes) seq.entries.push_back({index++, mode});
  return seq;
}

// Visits modes with lambda <= max_lambda in spectral order, generating them
// in lambda blocks so memory stays bounded. fn(index, block) receives the
// index of the block's first mode and the sorted block.
template <class Fn>
void for_each_spectral_block(std::int64_t lo, std::int64_t hi, std::int64_t block_width, Fn&& fn) {
  if (block_width < 1) throw invalid_input("block width must be positive");
  lo = std::max<std::int64_t>(lo, 5);
  std::int64_t index = count_modes_upto(lo - 1) + 1;
  for (std::int64_t start = lo; start <= hi; start += block_width) {
    const std::int64_t stop = std::min(hi, start + block_width - 1);
    auto block = modes_in_range(start, stop);
    if (!block.empty()) {
      fn(index, std::as_const(block));
      index += static_cast<std::int64_t>(block.size());
    }
    if (stop == hi) break;
  }
}

// q = sqrt(4 pi N / A) with A = pi^2 / 2, i.e. sqrt(8N/pi).
inline double weyl_q(double index) {
  if (!(index > 0.0)) throw invalid_input("Weyl rescaling needs N > 0");
  return std::sqrt(8.0 * index / std::numbers::pi);
}

// Inverse of weyl_q.
inline double weyl_index(double q) { return std::numbers::pi * q * q / 8.0; }

}  // namespace trinodal
