#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "trinodal/nodal_graph.hpp"
#include "trinodal/trace.hpp"

using namespace trinodal;

namespace {

const NodalSequence& small_sequence() {
  static const NodalSequence seq = nodal_sequence(10000);
  return seq;
}

}  // namespace

TEST(Cumulative, JumpAtDegenerateEigenvalue) {
  // lambda = 65 carries (8,1) and (7,4); the jump of C at sqrt(65) is the
  // sum of their loop counts, taken here from the graph construction.
  const double k = std::sqrt(65.0);
  const auto c = cumulative(CurveKind::loops_by_k, small_sequence(), 2e-9, k - 1e-9, k + 1e-9);
  std::int64_t expected = 0;
  for (const ModePair mode : {ModePair{8, 1}, ModePair{7, 4}}) {
    const Reduction r = reduce(mode);
    expected += r.tiles * counts_from_graph(build_graph(r.reduced)).loops;
  }
  EXPECT_EQ(c.values.back() - c.values.front(), expected);
  EXPECT_EQ(expected, 1);
}

TEST(Cumulative, IndexAndWavenumberCurvesAgree) {
  // After the last eigenfunction of a level, Q(N) equals C just above k_N.
  const auto& seq = small_sequence();
  for (std::size_t i = 10; i + 1 < seq.rows.size(); i += 97) {
    if (seq.rows[i].lambda() == seq.rows[i + 1].lambda()) continue;
    const double q = weyl_q(static_cast<double>(i + 1) + 0.5);
    const double k = std::sqrt(static_cast<double>(seq.rows[i].lambda())) + 1e-9;
    const auto qc = cumulative(CurveKind::loops_by_index, seq, 1.0, q, q);
    const auto kc = cumulative(CurveKind::loops_by_k, seq, 1.0, k, k);
    EXPECT_EQ(qc.values[0], kc.values[0]) << i;
  }
}

TEST(Cumulative, MonotoneAndBounded) {
  const auto c = cumulative(CurveKind::boundary_eta, small_sequence(), 0.05, 0.0, 100.0);
  EXPECT_TRUE(std::is_sorted(c.values.begin(), c.values.end()));
  EXPECT_EQ(c.values.front(), 0);
  EXPECT_THROW(cumulative(CurveKind::loops_by_k, small_sequence(), 0.05, 0.0, 101.0), invalid_input);
}

TEST(Fit, RecoversQuarticExactly) {
  const auto x = uniform_grid(100.0, 400.0, 0.05);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 0.25 * std::pow(x[i], 4);
  SmoothFitOptions opt;
  opt.degree = 4;
  const SmoothFit f = fit_polynomial(x, y, opt);
  ASSERT_EQ(f.coefficients.size(), 5u);
  EXPECT_NEAR(f.coefficients[4], 0.25, 0.25 * 1e-8);
  for (std::size_t i = 0; i < x.size(); i += 500) EXPECT_NEAR(f(x[i]) / y[i], 1.0, 1e-10);
  EXPECT_NEAR(log_log_slope(f, 200.0, 400.0), 4.0, 1e-6);
}

TEST(Fit, ConditionIsReportedAndTooFewSamplesRejected) {
  const auto x = uniform_grid(1.0, 2.0, 0.01);
  const std::vector<double> y(x.size(), 1.0);
  SmoothFitOptions opt;
  opt.degree = 3;
  EXPECT_LT(fit_polynomial(x, y, opt).condition, 100.0);
  opt.degree = 20;
  EXPECT_THROW(fit_polynomial(x, y, opt), invalid_input);
}

TEST(Fit, DefaultWindowSkipsLowestTenthOfRange) {
  const auto c = cumulative(CurveKind::loops_by_k, small_sequence(), 0.01, 0.0, 100.0);
  const SmoothFit f = smooth_fit(c, default_fit_options(CurveKind::loops_by_k));
  EXPECT_NEAR(f.fit_x0, 10.0, 0.011);
  EXPECT_DOUBLE_EQ(f.fit_x1, 100.0);
}

TEST(Spectrum, PureToneAtTwoPi) {
  const auto x = uniform_grid(0.0, 100.0, 0.01);
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = std::sin(2.0 * std::numbers::pi * x[i]);
  PowerSpectrum ps = power_spectrum(x, r, 0.0, 100.0, LengthGrid{0.0, 12.0, 0.005});
  annotate(ps, orbit_table(12.0), 0.05);
  const auto best = std::max_element(ps.power.begin(), ps.power.end());
  const double l = ps.lengths[static_cast<std::size_t>(best - ps.power.begin())];
  EXPECT_NEAR(l, 2.0 * std::numbers::pi, 0.01);
  ASSERT_FALSE(ps.peaks.empty());
  bool found = false;
  for (const auto& pk : ps.peaks) {
    if (pk.orbit && pk.orbit->kind == OrbitClass::family && pk.orbit->p == 1 && pk.orbit->q == 0) found = true;
  }
  EXPECT_TRUE(found);
}

TEST(Spectrum, ZeroResidualGivesZeroPower) {
  const auto x = uniform_grid(0.0, 50.0, 0.01);
  const std::vector<double> r(x.size(), 0.0);
  const PowerSpectrum ps = power_spectrum(x, r, 0.0, 50.0);
  for (double p : ps.power) EXPECT_EQ(p, 0.0);
  EXPECT_TRUE(detect_peaks(ps).empty());
}

TEST(Spectrum, ParsevalOverOnePeriod) {
  // F(l) = dx sum f_i exp(-i l x_i) is 2 pi / dx periodic, and the integral
  // of |F|^2 over one period is 2 pi dx sum f_i^2.
  const double dx = 0.1;
  const auto x = uniform_grid(0.0, 20.0, dx);
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = std::cos(1.3 * x[i]) + 0.5 * std::sin(4.1 * x[i] + 0.2);
  const double period = 2.0 * std::numbers::pi / dx;
  const double dl = period / 4000.0;
  const PowerSpectrum ps = power_spectrum(x, r, 0.0, 20.0, LengthGrid{0.0, period, dl});
  double integral = 0.0;
  for (std::size_t j = 0; j + 1 < ps.power.size(); ++j) integral += ps.power[j] * dl;
  double energy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * x[i] / 20.0));
    energy += (w * r[i]) * (w * r[i]);
  }
  EXPECT_NEAR(integral / (2.0 * std::numbers::pi * dx * energy), 1.0, 1e-6);
}

TEST(Spectrum, ShortWindowRejected) {
  const auto x = uniform_grid(0.0, 0.1, 0.01);
  const std::vector<double> r(x.size(), 1.0);
  EXPECT_THROW(power_spectrum(x, r, 0.0, 0.1, LengthGrid{0.0, 10.0, 0.1}), invalid_input);
}

TEST(Orbits, TableAndMatching) {
  const OrbitTable t = orbit_table(20.0);
  EXPECT_TRUE(std::is_sorted(t.entries.begin(), t.entries.end(),
                             [](const OrbitLength& a, const OrbitLength& b) { return a.length < b.length; }));
  std::vector<Peak> peaks{{6.29, 1.0, std::nullopt, {}}, {3.0, 1.0, std::nullopt, {}}};
  peaks = match_peaks(peaks, t, 0.05);
  ASSERT_TRUE(peaks[0].orbit);
  EXPECT_EQ(peaks[0].orbit->kind, OrbitClass::family);
  EXPECT_EQ(peaks[0].orbit->p, 1);
  EXPECT_EQ(peaks[0].orbit->q, 0);
  // 2 pi is shared by the (1,0) family and the single cathetus orbit.
  EXPECT_EQ(peaks[0].classes.size(), 2u);
  EXPECT_FALSE(peaks[1].orbit);
  EXPECT_THROW(orbit_table(6.0), invalid_input);
}

TEST(Orbits, MedianAndThreshold) {
  EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  PowerSpectrum ps;
  ps.lengths = {1, 2, 3, 4, 5, 6, 7};
  ps.power = {1, 1, 9, 1, 4, 1, 1};
  EXPECT_EQ(detect_peaks(ps).size(), 1u);
  PeakOptions opt;
  opt.threshold_factor = 3.0;
  EXPECT_EQ(detect_peaks(ps, opt).size(), 2u);
  opt.min_length = 4.0;
  EXPECT_EQ(detect_peaks(ps, opt).size(), 1u);
}

TEST(CurveKind, Parsing) {
  EXPECT_EQ(parse_curve_kind("C"), CurveKind::loops_by_k);
  EXPECT_EQ(parse_curve_kind("Q"), CurveKind::loops_by_index);
  EXPECT_EQ(parse_curve_kind("eta"), CurveKind::boundary_eta);
  EXPECT_THROW(parse_curve_kind("Z"), invalid_input);
}
