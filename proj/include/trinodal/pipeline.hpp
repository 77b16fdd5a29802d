#pragma once

// End-to-end runs shared by the command-line tool and the acceptance
// checks: the method-equivalence sweep and the cumulative-curve spectrum.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "trinodal/csv.hpp"
#include "trinodal/modes.hpp"
#include "trinodal/nodal_graph.hpp"
#include "trinodal/oracle.hpp"
#include "trinodal/parallel.hpp"
#include "trinodal/recursion.hpp"
#include "trinodal/stats.hpp"
#include "trinodal/trace.hpp"

namespace trinodal {

struct VerifyRow {
  ModePair mode;
  std::int64_t tiles = 1;
  NodalSummary recursion;
  NodalSummary graph;
  std::optional<std::int64_t> oracle_nu;
  bool eta_formula = true;  // graph eta == m+n-3 on the reduced pair
  bool ok = true;
};

struct VerifyReport {
  std::int64_t max_lambda = 0;
  std::int64_t oracle_bound = 0;
  std::vector<VerifyRow> rows;  // spectral order
  std::int64_t nontiling = 0;
  std::int64_t oracle_checked = 0;
  std::int64_t mismatches = 0;
  BuildStats stats;
};

// Compares recursion and graph counts for every mode with lambda <= max_lambda
// and, for max(m,n) <= oracle_bound, the grid oracle as well.
inline VerifyReport run_verify(std::int64_t max_lambda, std::int64_t oracle_bound, unsigned workers) {
  VerifyReport rep;
  rep.max_lambda = max_lambda;
  rep.oracle_bound = oracle_bound;
  if (max_lambda < 5) return rep;
  const std::vector<ModePair> modes = modes_in_range(5, max_lambda);
  rep.rows.resize(modes.size());
  const unsigned chunks = std::max(1u, workers);
  std::vector<BuildStats> stats(chunks);
  parallel_chunks(modes.size(), chunks, [&](std::size_t c, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      VerifyRow& row = rep.rows[i];
      row.mode = modes[i];
      row.recursion = nodal_count(row.mode);
      row.tiles = row.recursion.tiles;
      const ModePair red = row.recursion.reduced;
      const NodalGraph g = build_graph(red);
      stats[c] += g.stats;
      const GraphCounts gc = counts_from_graph(g);
      row.graph = row.recursion;
      row.graph.method = Method::graph;
      row.graph.nu = row.tiles * gc.nu;
      row.graph.eta = gc.eta;
      row.graph.loops = gc.loops;
      row.eta_formula = gc.eta == red.m + red.n - 3;
      row.ok = same_counts(row.recursion, row.graph) && row.eta_formula;
      if (row.mode.m <= oracle_bound) {
        row.oracle_nu = stable_count(row.mode);
        row.ok = row.ok && *row.oracle_nu == row.recursion.nu;
      }
    }
  });
  for (const auto& s : stats) rep.stats += s;
  for (const auto& row : rep.rows) {
    if (row.tiles == 1) ++rep.nontiling;
    if (row.oracle_nu) ++rep.oracle_checked;
    if (!row.ok) ++rep.mismatches;
  }
  return rep;
}

inline void write_verify_csv(std::ostream& out, const VerifyReport& rep) {
  out << "m,n,lambda,tiles,nu_recursion,nu_graph,eta_recursion,eta_graph,loops_recursion,loops_graph,"
         "nu_oracle,match\n";
  for (const auto& r : rep.rows) {
    out << r.mode.m << ',' << r.mode.n << ',' << r.mode.lambda() << ',' << r.tiles << ',' << r.recursion.nu
        << ',' << r.graph.nu << ',' << r.recursion.eta << ',' << r.graph.eta << ',' << r.recursion.loops << ','
        << r.graph.loops << ',';
    if (r.oracle_nu) out << *r.oracle_nu;
    out << ',' << (r.ok ? 1 : 0) << '\n';
  }
}

struct TraceParams {
  CurveKind kind = CurveKind::loops_by_k;
  double kmin = 100.0;  // transform window and default fit window start
  double kmax = 400.0;
  double step = 0.01;
  std::optional<int> degree;
  std::optional<double> fit_from;
  LengthGrid lengths{};
  double min_length = 1.0;
  double tolerance = 0.05;
  double threshold_factor = 5.0;
};

struct TraceResult {
  CumulativeCurve curve;
  SmoothFit fit;
  PowerSpectrum spectrum;
  std::int64_t sequence_length = 0;
  std::int64_t max_lambda = 0;
};

// Smallest lambda cutoff holding at least `count` modes.
inline std::int64_t lambda_for_count(std::int64_t count) {
  std::int64_t hi = 8;
  while (count_modes_upto(hi) < count) hi *= 2;
  std::int64_t lo = hi / 2;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (count_modes_upto(mid) >= count) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

inline TraceResult run_trace(const TraceParams& p, unsigned workers) {
  if (!(p.kmin > 0.0) || !(p.kmax > p.kmin)) throw invalid_input("trace needs 0 < kmin < kmax");
  TraceResult res;
  if (p.kind == CurveKind::loops_by_index) {
    const auto n_max = static_cast<std::int64_t>(std::floor(weyl_index(p.kmax))) + 1;
    res.max_lambda = std::max<std::int64_t>(lambda_for_count(n_max), 5);
  } else {
    res.max_lambda = std::max<std::int64_t>(static_cast<std::int64_t>(std::floor(p.kmax * p.kmax)), 5);
  }
  const NodalSequence seq = nodal_sequence(res.max_lambda, workers);
  res.sequence_length = static_cast<std::int64_t>(seq.rows.size());
  res.curve = cumulative(p.kind, seq, p.step, 0.0, p.kmax);
  SmoothFitOptions opt = default_fit_options(p.kind);
  if (p.degree) opt.degree = *p.degree;
  opt.x0 = p.fit_from.value_or(p.kmin);
  opt.x1 = p.kmax;
  res.fit = smooth_fit(res.curve, opt);
  res.spectrum = power_spectrum(res.fit.x, res.fit.residual, p.kmin, p.kmax, p.lengths, workers);
  PeakOptions po;
  po.threshold_factor = p.threshold_factor;
  po.min_length = p.min_length;
  annotate(res.spectrum, orbit_table(std::max(p.lengths.l1, 2.0 * std::numbers::pi + 1.0)), p.tolerance, po);
  return res;
}

}  // namespace trinodal
