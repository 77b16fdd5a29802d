#pragma once

// Grid-sampling nodal-domain counter, used only to cross-check the exact
// methods. Samples phi at (pi i/R, pi j/R), 0 < j < i < R, and labels
// 4-connected same-sign clusters row by row (Hoshen-Kopelman).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "trinodal/error.hpp"
#include "trinodal/modes.hpp"
#include "trinodal/nodal_graph.hpp"

namespace trinodal {

// Samples with |phi| below this are treated as nodal and join no domain.
inline constexpr double kOracleZero = 1e-12;

struct SignGrid {
  std::int64_t resolution = 0;
  // Row j holds i = j+1 .. R-1; entries are -1, 0 (skipped), +1.
  std::vector<std::vector<signed char>> rows;

  signed char at(std::int64_t i, std::int64_t j) const { return rows[j][i - j - 1]; }
};

namespace detail {

inline std::vector<double> sin_table(std::int64_t k, std::int64_t resolution) {
  std::vector<double> t(static_cast<std::size_t>(resolution) + 1);
  for (std::int64_t i = 0; i <= resolution; ++i) {
    t[i] = sin_pi_fraction<double>(turn_residue(k, i, resolution), resolution);
  }
  return t;
}

inline void check_resolution(const ModePair& mode, std::int64_t resolution) {
  require_valid(mode);
  if (resolution < 4 * mode.m) {
    throw invalid_input("grid resolution must be at least 4*max(m,n)");
  }
}

template <class RowFn>
void for_each_sign_row(const ModePair& mode, std::int64_t resolution, RowFn&& fn) {
  const auto sm = sin_table(mode.m, resolution);
  const auto sn = sin_table(mode.n, resolution);
  std::vector<signed char> row;
  for (std::int64_t j = 1; j + 1 < resolution; ++j) {
    row.assign(static_cast<std::size_t>(resolution - j - 1), 0);
    for (std::int64_t i = j + 1; i < resolution; ++i) {
      const double v = sm[i] * sn[j] - sn[i] * sm[j];
      row[i - j - 1] = std::abs(v) < kOracleZero ? 0 : (v > 0 ? 1 : -1);
    }
    fn(j, row);
  }
}

}  // namespace detail

inline SignGrid sign_grid(const ModePair& mode, std::int64_t resolution) {
  detail::check_resolution(mode, resolution);
  SignGrid g;
  g.resolution = resolution;
  detail::for_each_sign_row(mode, resolution,
                            [&](std::int64_t, const std::vector<signed char>& row) { g.rows.push_back(row); });
  return g;
}

inline std::int64_t grid_count(const ModePair& mode, std::int64_t resolution) {
  detail::check_resolution(mode, resolution);
  const auto r = resolution;
  // Labels indexed by i; row j covers i in (j, R).
  std::vector<std::int32_t> prev(static_cast<std::size_t>(r), -1);
  std::vector<std::int32_t> cur(static_cast<std::size_t>(r), -1);
  std::vector<signed char> prev_sign(static_cast<std::size_t>(r), 0);
  std::vector<std::int32_t> parent;
  auto find = [&](std::int32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };

  detail::for_each_sign_row(mode, r, [&](std::int64_t j, const std::vector<signed char>& row) {
    std::fill(cur.begin(), cur.end(), -1);
    for (std::int64_t i = j + 1; i < r; ++i) {
      const signed char s = row[i - j - 1];
      if (s == 0) continue;
      std::int32_t label = -1;
      if (i - 1 > j && cur[i - 1] >= 0 && row[i - j - 2] == s) label = cur[i - 1];
      if (prev[i] >= 0 && prev_sign[i] == s) {
        if (label < 0) {
          label = prev[i];
        } else {
          unite(label, prev[i]);
        }
      }
      if (label < 0) {
        label = static_cast<std::int32_t>(parent.size());
        parent.push_back(label);
      }
      cur[i] = label;
    }
    std::swap(prev, cur);
    std::fill(prev_sign.begin(), prev_sign.end(), 0);
    for (std::int64_t i = j + 1; i < r; ++i) prev_sign[i] = row[i - j - 1];
  });

  std::int64_t roots = 0;
  for (std::size_t x = 0; x < parent.size(); ++x) {
    if (find(static_cast<std::int32_t>(x)) == static_cast<std::int32_t>(x)) ++roots;
  }
  return roots;
}

struct StableCountOptions {
  std::int64_t start_factor = 20;        // R0 = start_factor * max(m, n)
  std::int64_t max_resolution = 1 << 15;
};

struct StableCount {
  std::int64_t nu = 0;
  std::int64_t resolution = 0;  // the finer of the two agreeing grids
};

// Doubles R from R0 until two consecutive resolutions agree.
inline StableCount stable_count_detail(const ModePair& mode, const StableCountOptions& opt = {}) {
  require_valid(mode);
  std::int64_t r = std::max(opt.start_factor * mode.m, 4 * mode.m);
  std::int64_t last = grid_count(mode, r);
  while (2 * r <= opt.max_resolution) {
    r *= 2;
    const std::int64_t next = grid_count(mode, r);
    if (next == last) return {next, r};
    last = next;
  }
  throw no_convergence("grid count of " + to_string(mode) + " did not stabilise below R=" +
                       std::to_string(opt.max_resolution));
}

inline std::int64_t stable_count(const ModePair& mode, const StableCountOptions& opt = {}) {
  return stable_count_detail(mode, opt).nu;
}

inline NodalSummary oracle_nodal_count(const ModePair& mode, const StableCountOptions& opt = {}) {
  NodalSummary s;
  const Reduction r = reduce(mode);
  s.mode = mode;
  s.reduced = r.reduced;
  s.tiles = r.tiles;
  s.nu = stable_count(mode, opt);
  s.method = Method::oracle;
  return s;
}

}  // namespace trinodal
