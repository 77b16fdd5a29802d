#pragma once

// Closed-form loop count I, boundary count eta and nodal count nu.
//
// I_{m,n} = Itilde(n, (m-n-1)/2, 0) where Itilde is a Euclid-like recursion
// on (n, k, l). The recursion is run as an explicit state loop.

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "trinodal/error.hpp"
#include "trinodal/modes.hpp"

namespace trinodal {

struct RecursionState {
  std::int64_t n = 1;
  std::int64_t k = 0;
  std::int64_t l = 0;

  friend constexpr bool operator==(const RecursionState&, const RecursionState&) = default;
};

enum class Method { recursion, graph, oracle };

inline const char* to_string(Method method) {
  switch (method) {
    case Method::recursion: return "recursion";
    case Method::graph: return "graph";
    case Method::oracle: return "oracle";
  }
  return "?";
}

// Counts for one eigenfunction. eta and loops describe the reduced pair;
// nu is the count for the original mode, tiles * nu(reduced).
struct NodalSummary {
  ModePair mode;
  ModePair reduced;
  std::int64_t nu = 0;
  std::int64_t eta = 0;
  std::int64_t loops = 0;
  std::int64_t tiles = 1;
  Method method = Method::recursion;

  friend bool operator==(const NodalSummary&, const NodalSummary&) = default;
};

// Fields that must agree across methods.
inline bool same_counts(const NodalSummary& a, const NodalSummary& b) {
  return a.mode == b.mode && a.reduced == b.reduced && a.nu == b.nu && a.eta == b.eta &&
         a.loops == b.loops && a.tiles == b.tiles;
}

inline constexpr int kMaxRecursionSteps = 4096;

namespace detail {

inline std::int64_t narrow_count(__int128 v, const char* what) {
  if (v < 0 || v > static_cast<__int128>(INT64_MAX)) {
    throw invariant_violation(std::string("loop count overflow in ") + what);
  }
  return static_cast<std::int64_t>(v);
}

// One application of the recursion. Returns false at a base case.
inline bool itilde_step(RecursionState& s, __int128& acc) {
  const std::int64_t n = s.n;
  const std::int64_t k = s.k;
  const std::int64_t l = s.l;
  if (n == 1 || k == 0) return false;
  const std::int64_t odd = 2 * k + 1;
  if (odd < n) {
    // floor(n/(2k+1)) * (lk + (2l+1)k^2)
    const __int128 q = n / odd;
    acc += q * (static_cast<__int128>(l) * k + static_cast<__int128>(2 * l + 1) * k * k);
    s.n = n % odd;
  } else if (odd > 2 * n) {
    // (1/2) floor(k/n) (2l+1)(n^2 - n); n^2 - n is even
    const __int128 q = k / n;
    acc += q * (2 * l + 1) * (static_cast<__int128>(n) * (n - 1) / 2);
    s.k = k % n;
  } else if (n < odd && odd < 2 * n) {
    // (l + 1/2) X + k/2 = ((2l+1) X + k) / 2 with X = 2k^2 + n^2 - n - 2nk + k.
    // X has the parity of k, so (2l+1) X + k is even.
    const __int128 x = static_cast<__int128>(2) * k * k + static_cast<__int128>(n) * n - n -
                       static_cast<__int128>(2) * n * k + k;
    acc += ((2 * static_cast<__int128>(l) + 1) * x + k) / 2;
    s = RecursionState{2 * k - n + 1, n - k - 1, l + 1};
  } else {
    throw invariant_violation("recursion reached 2k+1 in {n, 2n} at (n=" + std::to_string(n) +
                              ", k=" + std::to_string(k) + "); input was a tiling pair");
  }
  return true;
}

inline void check_state(const RecursionState& s) {
  if (s.n < 1 || s.k < 0 || s.l < 0) {
    throw invalid_input("recursion state needs n >= 1, k >= 0, l >= 0");
  }
}

}  // namespace detail

inline std::int64_t itilde(RecursionState state) {
  detail::check_state(state);
  __int128 acc = 0;
  int steps = 0;
  while (detail::itilde_step(state, acc)) {
    if (++steps > kMaxRecursionSteps) {
      throw no_convergence("loop-count recursion exceeded the step guard");
    }
#ifndef NDEBUG
    // Non-tiling closure along the chain.
    if (state.n > 1 && state.k > 0 && std::gcd(state.n + 2 * state.k + 1, state.n) != 1) {
      throw invariant_violation("recursion left the non-tiling class");
    }
#endif
  }
  return detail::narrow_count(acc, "itilde");
}

// Every state visited, starting state first and the terminal state last.
inline std::vector<RecursionState> itilde_path(RecursionState state) {
  detail::check_state(state);
  std::vector<RecursionState> path{state};
  __int128 acc = 0;
  while (detail::itilde_step(state, acc)) {
    path.push_back(state);
    if (static_cast<int>(path.size()) > kMaxRecursionSteps) {
      throw no_convergence("loop-count recursion exceeded the step guard");
    }
  }
  return path;
}

inline void require_nontiling(const ModePair& mode) {
  if (!is_nontiling(mode)) {
    throw invalid_input("mode " + to_string(mode) + " is tiling; reduce it first");
  }
}

inline RecursionState initial_state(const ModePair& mode) {
  require_nontiling(mode);
  return RecursionState{mode.n, (mode.m - mode.n - 1) / 2, 0};
}

inline std::int64_t loop_count(const ModePair& mode) { return itilde(initial_state(mode)); }

// Boundary intersections of a non-tiling mode.
inline std::int64_t boundary_count(const ModePair& mode) {
  require_nontiling(mode);
  return mode.m + mode.n - 3;
}

inline NodalSummary nodal_count(const ModePair& mode) {
  const Reduction r = reduce(mode);
  NodalSummary s;
  s.mode = mode;
  s.reduced = r.reduced;
  s.tiles = r.tiles;
  s.eta = boundary_count(r.reduced);
  s.loops = loop_count(r.reduced);
  s.nu = r.tiles * (1 + s.eta / 2 + s.loops);
  s.method = Method::recursion;
  return s;
}

}  // namespace trinodal
