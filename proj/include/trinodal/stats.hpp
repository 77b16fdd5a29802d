#pragma once

// Nodal count sequence in spectral order and the distribution of the scaled
// count xi_N = nu_N / N over windows lambda <= lambda_N <= (1+g) lambda.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trinodal/error.hpp"
#include "trinodal/modes.hpp"
#include "trinodal/parallel.hpp"
#include "trinodal/recursion.hpp"

namespace trinodal {

struct NodalRow {
  std::int64_t index = 0;  // N
  ModePair mode;
  std::int64_t nu = 0;
  std::int64_t eta = 0;    // reduced pair
  std::int64_t loops = 0;  // reduced pair
  std::int64_t tiles = 1;

  std::int64_t lambda() const { return mode.lambda(); }
  double xi() const { return static_cast<double>(nu) / static_cast<double>(index); }
  // Loops of the whole pattern: each tile carries the reduced pattern.
  std::int64_t total_loops() const { return tiles * loops; }
  // Boundary intersections of the whole pattern. The zero count of the
  // normal derivative along the boundary is m + n - 3 for tiling modes too.
  std::int64_t total_eta() const { return mode.m + mode.n - 3; }
};

struct NodalSequence {
  std::int64_t min_lambda = 5;
  std::int64_t max_lambda = 0;
  std::vector<NodalRow> rows;
};

inline NodalRow make_row(std::int64_t index, const ModePair& mode) {
  const NodalSummary s = nodal_count(mode);
  return NodalRow{index, mode, s.nu, s.eta, s.loops, s.tiles};
}

inline constexpr std::int64_t kDefaultBlockWidth = 1 << 16;

// Streams rows with lambda in [lo, hi] in spectral order, one lambda block at
// a time. Rows inside a block are evaluated by `workers` threads.
template <class Fn>
void for_each_nodal_block(std::int64_t lo, std::int64_t hi, unsigned workers, Fn&& fn,
                          std::int64_t block_width = kDefaultBlockWidth) {
  if (hi < 5) throw invalid_input("lambda cutoff is below the ground state 5");
  std::vector<NodalRow> rows;
  for_each_spectral_block(lo, hi, block_width,
                          [&](std::int64_t first, const std::vector<ModePair>& block) {
                            rows.assign(block.size(), NodalRow{});
                            parallel_chunks(block.size(), workers,
                                            [&](std::size_t, std::size_t b, std::size_t e) {
                                              for (std::size_t i = b; i < e; ++i) {
                                                rows[i] = make_row(first + static_cast<std::int64_t>(i), block[i]);
                                              }
                                            });
                            fn(std::as_const(rows));
                          });
}

inline NodalSequence nodal_sequence_window(std::int64_t lo, std::int64_t hi, unsigned workers = 1) {
  NodalSequence seq;
  seq.min_lambda = std::max<std::int64_t>(lo, 5);
  seq.max_lambda = hi;
  for_each_nodal_block(lo, hi, workers, [&](const std::vector<NodalRow>& block) {
    seq.rows.insert(seq.rows.end(), block.begin(), block.end());
  });
  return seq;
}

inline NodalSequence nodal_sequence(std::int64_t max_lambda, unsigned workers = 1) {
  if (max_lambda < 5) throw invalid_input("lambda cutoff is below the ground state 5");
  return nodal_sequence_window(5, max_lambda, workers);
}

// Tile classes {1, 2, 4-9, 10-99, 100-999, 1000-9999, >=10^4}.
inline constexpr int kTileClasses = 7;
inline constexpr std::array<const char*, kTileClasses> kTileClassNames = {
    "tiles_1", "tiles_2", "tiles_4_9", "tiles_10_99", "tiles_100_999", "tiles_1000_9999", "tiles_10000_up"};

inline int tile_class(std::int64_t tiles) {
  if (tiles <= 1) return 0;
  if (tiles == 2) return 1;
  if (tiles < 10) return 2;
  if (tiles < 100) return 3;
  if (tiles < 1000) return 4;
  if (tiles < 10000) return 5;
  return 6;
}

// Exact positive rational, for bin edges.
struct Ratio {
  std::int64_t num = 1;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct DistributionHistogram {
  std::int64_t lambda_low = 0;   // window [lambda_low, lambda_high]
  std::int64_t lambda_high = 0;
  double g = 1.0;
  Ratio xi_max;                  // bins cover [0, xi_max]
  std::vector<double> bin_edges; // bins + 1 entries
  std::vector<std::int64_t> counts;
  std::vector<std::array<std::int64_t, kTileClasses>> strata;
  std::int64_t total = 0;

  std::size_t bins() const { return counts.size(); }
  double mass(std::size_t bin) const {
    return total == 0 ? 0.0 : static_cast<double>(counts[bin]) / static_cast<double>(total);
  }
  std::vector<double> masses() const {
    std::vector<double> out(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) out[i] = mass(i);
    return out;
  }
};

namespace detail {

inline DistributionHistogram empty_histogram(std::size_t bins, Ratio xi_max) {
  if (bins == 0) throw invalid_input("histogram needs at least one bin");
  if (xi_max.num <= 0 || xi_max.den <= 0) throw invalid_input("histogram range must be positive");
  DistributionHistogram h;
  h.xi_max = xi_max;
  h.counts.assign(bins, 0);
  h.strata.assign(bins, {});
  h.bin_edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    h.bin_edges[i] = xi_max.value() * static_cast<double>(i) / static_cast<double>(bins);
  }
  return h;
}

// floor(xi / xi_max * bins) in exact integer arithmetic, clamped to the last bin.
inline std::size_t xi_bin(const NodalRow& row, Ratio xi_max, std::size_t bins) {
  const __int128 num = static_cast<__int128>(row.nu) * xi_max.den * static_cast<__int128>(bins);
  const __int128 den = static_cast<__int128>(row.index) * xi_max.num;
  const auto b = static_cast<std::size_t>(num / den);
  return std::min(b, bins - 1);
}

}  // namespace detail

inline std::int64_t window_high(std::int64_t lambda, double g) {
  if (!(g > 0.0)) throw invalid_input("window width g must be positive");
  return static_cast<std::int64_t>(std::floor(static_cast<long double>(lambda) * (1.0L + g)));
}

// Unnormalized histogram of rows with lambda in [lo, hi] over [0, xi_max].
inline DistributionHistogram histogram_counts(const std::vector<NodalRow>& rows, std::int64_t lo,
                                              std::int64_t hi, Ratio xi_max, std::size_t bins) {
  DistributionHistogram h = detail::empty_histogram(bins, xi_max);
  h.lambda_low = lo;
  h.lambda_high = hi;
  for (const auto& row : rows) {
    const auto l = row.lambda();
    if (l < lo || l > hi) continue;
    const std::size_t b = detail::xi_bin(row, xi_max, bins);
    ++h.counts[b];
    ++h.strata[b][tile_class(row.tiles)];
    ++h.total;
  }
  return h;
}

// Adds b into a; both must share the bin layout.
inline void merge_into(DistributionHistogram& a, const DistributionHistogram& b) {
  if (a.counts.size() != b.counts.size() || a.xi_max.num * b.xi_max.den != b.xi_max.num * a.xi_max.den) {
    throw invalid_input("cannot merge histograms with different bins");
  }
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    a.counts[i] += b.counts[i];
    for (int c = 0; c < kTileClasses; ++c) a.strata[i][c] += b.strata[i][c];
  }
  a.total += b.total;
  a.lambda_low = std::min(a.lambda_low, b.lambda_low);
  a.lambda_high = std::max(a.lambda_high, b.lambda_high);
}

// Largest xi in the window, as an exact ratio.
inline Ratio max_xi(const std::vector<NodalRow>& rows, std::int64_t lo, std::int64_t hi) {
  Ratio best{0, 1};
  for (const auto& row : rows) {
    const auto l = row.lambda();
    if (l < lo || l > hi) continue;
    if (static_cast<__int128>(row.nu) * best.den > static_cast<__int128>(best.num) * row.index) {
      best = {row.nu, row.index};
    }
  }
  return best;
}

// P_{lambda,g}(xi) as a binned histogram. Default range is [0, max xi in the
// window]; bins are uniform.
inline DistributionHistogram distribution(const NodalSequence& seq, std::int64_t lambda, double g,
                                          std::size_t bins, std::optional<Ratio> xi_max = std::nullopt) {
  const std::int64_t hi = window_high(lambda, g);
  if (hi > seq.max_lambda || lambda < seq.min_lambda) {
    throw invalid_input("distribution window is not covered by the sequence");
  }
  const Ratio range = xi_max ? *xi_max : max_xi(seq.rows, lambda, hi);
  if (range.num == 0) throw invalid_input("distribution window holds no eigenfunction");
  DistributionHistogram h = histogram_counts(seq.rows, lambda, hi, range, bins);
  h.g = g;
  return h;
}

// Streams the window without materializing the sequence. Two passes when
// the range is taken from the data.
inline DistributionHistogram distribution_streamed(std::int64_t lambda, double g, std::size_t bins,
                                                   unsigned workers,
                                                   std::optional<Ratio> xi_max = std::nullopt) {
  const std::int64_t hi = window_high(lambda, g);
  Ratio range{0, 1};
  if (xi_max) {
    range = *xi_max;
  } else {
    for_each_nodal_block(lambda, hi, workers, [&](const std::vector<NodalRow>& block) {
      const Ratio r = max_xi(block, lambda, hi);
      if (static_cast<__int128>(r.num) * range.den > static_cast<__int128>(range.num) * r.den) range = r;
    });
  }
  if (range.num == 0) throw invalid_input("distribution window holds no eigenfunction");
  DistributionHistogram h = detail::empty_histogram(bins, range);
  h.lambda_low = lambda;
  h.lambda_high = hi;
  h.g = g;
  for_each_nodal_block(lambda, hi, workers, [&](const std::vector<NodalRow>& block) {
    merge_into(h, histogram_counts(block, lambda, hi, range, bins));
  });
  h.lambda_low = lambda;
  h.lambda_high = hi;
  return h;
}

// Running sum of bin masses.
inline std::vector<double> integrated_distribution(const DistributionHistogram& h) {
  std::vector<double> out(h.counts.size());
  std::int64_t running = 0;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    running += h.counts[i];
    out[i] = h.total == 0 ? 0.0 : static_cast<double>(running) / static_cast<double>(h.total);
  }
  return out;
}

// Interior bins that are strict local maxima with mass above `floor`
// times the global maximum.
inline std::vector<std::size_t> interior_local_maxima(const DistributionHistogram& h, double floor) {
  std::vector<std::size_t> out;
  std::int64_t peak = 0;
  for (auto c : h.counts) peak = std::max(peak, c);
  for (std::size_t i = 1; i + 1 < h.counts.size(); ++i) {
    const auto c = h.counts[i];
    if (c > h.counts[i - 1] && c > h.counts[i + 1] &&
        static_cast<double>(c) > floor * static_cast<double>(peak)) {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace trinodal
