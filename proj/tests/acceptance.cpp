// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "trinodal/csv.hpp"
#include "trinodal/nodal_graph.hpp"
#include "trinodal/oracle.hpp"
#include "trinodal/pipeline.hpp"
#include "trinodal/stats.hpp"
#include "trinodal/trace.hpp"

using namespace trinodal;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(digits);
  o << v;
  return o.str();
}

// Shared between criteria 2, 4 and 10, and between 9 and 10.
struct Shared {
  VerifyReport sweep;
  std::string sweep_csv;
  std::string histogram_csv;
  DistributionHistogram histogram;
};

constexpr std::int64_t kSweepLambda = 100000;
constexpr std::int64_t kDistributionLambda = 1000000;

Outcome fixture_nine_four() {
  const auto t0 = std::chrono::steady_clock::now();
  const ModePair mode{9, 4};
  const NodalSummary r = nodal_count(mode);
  const NodalSummary g = graph_nodal_count(mode);
  const NodalSummary o = oracle_nodal_count(mode);
  const double dt = seconds_since(t0);
  auto exact = [](const NodalSummary& s) { return s.nu == 10 && s.eta == 10 && s.loops == 4 && s.tiles == 1; };
  const bool ok = exact(r) && exact(g) && o.nu == 10 && o.tiles == 1 && dt < 1.0;
  return {ok, "recursion nu=" + std::to_string(r.nu) + " eta=" + std::to_string(r.eta) + " I=" +
                  std::to_string(r.loops) + "; graph nu=" + std::to_string(g.nu) + " eta=" + std::to_string(g.eta) +
                  " I=" + std::to_string(g.loops) + "; oracle nu=" + std::to_string(o.nu) + "; " + fixed(dt) + " s"};
}

Outcome method_equivalence(Shared& shared) {
  const auto t0 = std::chrono::steady_clock::now();
  shared.sweep = run_verify(kSweepLambda, 0, 1);
  const double dt = seconds_since(t0);
  std::ostringstream csv;
  write_verify_csv(csv, shared.sweep);
  shared.sweep_csv = csv.str();
  std::int64_t mismatches = 0;
  for (const auto& row : shared.sweep.rows) {
    if (row.tiles == 1 && !same_counts(row.recursion, row.graph)) ++mismatches;
  }
  const bool ok = mismatches == 0 && shared.sweep.nontiling > 10000 && dt < 600.0;
  return {ok, std::to_string(shared.sweep.nontiling) + " non-tiling modes with lambda <= " +
                  std::to_string(kSweepLambda) + ", " + std::to_string(mismatches) + " mismatches, " + fixed(dt, 1) +
                  " s"};
}

Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::int64_t modes = 0, mismatches = 0, max_resolution = 0;
  for (std::int64_t m = 2; m <= 40; ++m) {
    for (std::int64_t n = 1; n < m; ++n) {
      const ModePair mode{m, n};
      const StableCount sc = stable_count_detail(mode);
      max_resolution = std::max(max_resolution, sc.resolution);
      ++modes;
      if (sc.nu != nodal_count(mode).nu) {
        ++mismatches;
        std::cerr << "  oracle mismatch at " << to_string(mode) << "\n";
      }
    }
  }
  return {mismatches == 0, std::to_string(modes) + " modes with max(m,n) <= 40, " + std::to_string(mismatches) +
                               " mismatches, finest grid R=" + std::to_string(max_resolution) + ", " +
                               fixed(seconds_since(t0), 1) + " s"};
}

Outcome eta_formula(const Shared& shared) {
  std::int64_t checked = 0, failures = 0;
  for (const auto& row : shared.sweep.rows) {
    if (row.tiles != 1) continue;
    ++checked;
    if (row.graph.eta != row.mode.m + row.mode.n - 3) ++failures;
  }
  return {checked > 0 && failures == 0,
          std::to_string(checked) + " graph-derived eta values, " + std::to_string(failures) + " differ from m+n-3"};
}

Outcome courant_bound() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::int64_t target = 1000000;
  const std::int64_t cutoff = lambda_for_count(target);
  std::int64_t seen = 0, violations = 0;
  for_each_nodal_block(5, cutoff, 1, [&](const std::vector<NodalRow>& block) {
    for (const auto& row : block) {
      if (row.index > target) return;
      ++seen;
      if (row.nu > row.index) ++violations;
    }
  });
  return {seen == target && violations == 0, std::to_string(seen) + " eigenfunctions, " +
                                                  std::to_string(violations) + " with nu > N, " +
                                                  fixed(seconds_since(t0), 1) + " s"};
}

Outcome tiling_multiplicativity() {
  const std::int64_t base = graph_nodal_count({7, 2}).nu;
  const std::int64_t g95 = graph_nodal_count({9, 5}).nu;
  const std::int64_t g216 = graph_nodal_count({21, 6}).nu;
  // Independent count on the un-reduced eigenfunctions themselves.
  const std::int64_t o95 = stable_count({9, 5});
  const std::int64_t o216 = stable_count({21, 6});
  const bool ok = g95 == 2 * base && g216 == 9 * base && o95 == g95 && o216 == g216;
  return {ok, "nu(7,2)=" + std::to_string(base) + ", nu(9,5)=" + std::to_string(g95) + " (grid " +
                  std::to_string(o95) + "), nu(21,6)=" + std::to_string(g216) + " (grid " + std::to_string(o216) +
                  ")"};
}

Outcome smooth_exponents(const NodalSequence& seq) {
  SmoothFitOptions opt;
  opt.x0 = 200.0;
  opt.x1 = 400.0;
  const SmoothFit c = smooth_fit(cumulative(CurveKind::loops_by_k, seq, 0.01, 0.0, 400.0), opt);
  const SmoothFit e = smooth_fit(cumulative(CurveKind::boundary_eta, seq, 0.01, 0.0, 400.0), opt);
  const double sc = log_log_slope(c, 200.0, 400.0);
  const double se = log_log_slope(e, 200.0, 400.0);
  const bool ok = sc >= 3.8 && sc <= 4.2 && se >= 2.8 && se <= 3.2;
  return {ok, "C(k) slope " + fixed(sc) + " (want [3.8, 4.2]), boundary-count slope " + fixed(se) +
                  " (want [2.8, 3.2])"};
}

Outcome orbit_peaks() {
  TraceParams p;
  p.kind = CurveKind::loops_by_k;
  p.kmin = 100.0;
  p.kmax = 400.0;
  const TraceResult r = run_trace(p, 1);
  const double threshold = 5.0 * median(r.spectrum.power);
  std::vector<Peak> matched;
  for (const auto& pk : r.spectrum.peaks) {
    if (pk.orbit) matched.push_back(pk);
  }
  std::stable_sort(matched.begin(), matched.end(), [](const Peak& a, const Peak& b) { return a.power > b.power; });
  bool top_ok = matched.size() >= 3;
  std::string detail = "top matched:";
  for (std::size_t i = 0; i < std::min<std::size_t>(3, matched.size()); ++i) {
    const Peak& pk = matched[i];
    // Nearest family length with |p|, |q| <= 5.
    bool family = false;
    for (std::int64_t a = 1; a <= 5; ++a) {
      for (std::int64_t b = 0; b <= a; ++b) {
        const double len = 2.0 * std::numbers::pi * std::sqrt(double(a * a + b * b));
        if (std::abs(len - pk.length) <= 0.05) family = true;
      }
    }
    top_ok = top_ok && family;
    detail += " l=" + fixed(pk.length) + " (" + std::to_string(pk.orbit->p) + "," + std::to_string(pk.orbit->q) +
              ")" + (family ? "" : "!");
  }
  bool two_pi = false;
  for (const auto& pk : r.spectrum.peaks) {
    if (std::abs(pk.length - 2.0 * std::numbers::pi) <= 0.05 && pk.power > threshold) two_pi = true;
  }
  detail += two_pi ? "; 2pi peak above 5x median" : "; 2pi peak missing";
  return {top_ok && two_pi, detail};
}

Outcome distribution_structure(Shared& shared) {
  const auto t0 = std::chrono::steady_clock::now();
  shared.histogram = distribution_streamed(kDistributionLambda, 1.0, 1000, 1);
  const auto& h = shared.histogram;
  std::ostringstream csv;
  write_histogram_csv(csv, h);
  shared.histogram_csv = csv.str();
  double mass = 0.0;
  bool strata_ok = true;
  bool up = false, down = false;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    mass += h.mass(i);
    std::int64_t s = 0;
    for (auto c : h.strata[i]) s += c;
    strata_ok = strata_ok && s == h.counts[i];
    if (i + 1 < h.bins()) {
      up = up || h.counts[i + 1] > h.counts[i];
      down = down || h.counts[i + 1] < h.counts[i];
    }
  }
  const std::size_t maxima = interior_local_maxima(h, 0.01).size();
  const bool ok = up && down && maxima >= 5 && std::abs(mass - 1.0) <= 1e-12 && strata_ok;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", std::abs(mass - 1.0));
  return {ok, std::to_string(h.total) + " eigenfunctions, " + std::to_string(maxima) +
                  " interior maxima above 1%, |mass-1|=" + buf + ", strata " + (strata_ok ? "consistent" : "BROKEN") +
                  ", " + fixed(seconds_since(t0), 1) + " s"};
}

Outcome determinism(const Shared& shared) {
  const unsigned many = std::max(4u, std::thread::hardware_concurrency());
  std::ostringstream sweep;
  write_verify_csv(sweep, run_verify(kSweepLambda, 0, many));
  std::ostringstream hist;
  write_histogram_csv(hist, distribution_streamed(kDistributionLambda, 1.0, 1000, many));
  const bool a = sweep.str() == shared.sweep_csv;
  const bool b = hist.str() == shared.histogram_csv;
  return {a && b, std::string("workers 1 vs ") + std::to_string(many) + ": sweep CSV " +
                      (a ? "identical" : "DIFFERS") + " (" + std::to_string(shared.sweep_csv.size()) +
                      " bytes), histogram CSV " + (b ? "identical" : "DIFFERS") + " (" +
                      std::to_string(shared.histogram_csv.size()) + " bytes)"};
}

}  // namespace

int main() {
  Shared shared;
  const NodalSequence seq = nodal_sequence(160000);
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, [] { return fixture_nine_four(); }},
      {2, [&] { return method_equivalence(shared); }},
      {3, [] { return oracle_equivalence(); }},
      {4, [&] { return eta_formula(shared); }},
      {5, [] { return courant_bound(); }},
      {6, [] { return tiling_multiplicativity(); }},
      {7, [&] { return smooth_exponents(seq); }},
      {8, [] { return orbit_peaks(); }},
      {9, [&] { return distribution_structure(shared); }},
      {10, [&] { return determinism(shared); }},
  };
  int failures = 0;
  for (const auto& [id, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
  return failures == 0 ? 0 : 1;
}
