#pragma once

// Cumulative counting functions and their periodic-orbit content.
//
//   C(k) = sum_n iota_n Theta(k - k_n)        (k_n = sqrt(lambda_n))
//   Q(N) = sum_{n <= floor N} iota_n,  sampled in q = sqrt(8N/pi)
//
// The smooth part is removed by a least-squares polynomial and the
// oscillatory residual is Fourier transformed against exp(-i l x); peaks in
// |F(l)|^2 are compared with periodic-orbit lengths of the triangle.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "trinodal/error.hpp"
#include "trinodal/modes.hpp"
#include "trinodal/parallel.hpp"
#include "trinodal/stats.hpp"

namespace trinodal {

enum class CurveKind {
  loops_by_k,      // C(k)
  loops_by_index,  // Q(N), abscissa q
  boundary_eta,    // sum of eta over k_n <= k
};

inline const char* to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::loops_by_k: return "C";
    case CurveKind::loops_by_index: return "Q";
    case CurveKind::boundary_eta: return "eta";
  }
  return "?";
}

inline CurveKind parse_curve_kind(const std::string& s) {
  if (s == "C" || s == "c") return CurveKind::loops_by_k;
  if (s == "Q" || s == "q") return CurveKind::loops_by_index;
  if (s == "eta" || s == "E") return CurveKind::boundary_eta;
  throw invalid_input("unknown curve kind '" + s + "' (expected C, Q or eta)");
}

struct CumulativeCurve {
  CurveKind kind = CurveKind::loops_by_k;
  double x0 = 0.0;
  double step = 0.0;
  std::vector<double> x;
  std::vector<std::int64_t> values;

  char variable() const { return kind == CurveKind::loops_by_index ? 'q' : 'k'; }
};

// Grid x0, x0 + step, ... up to x1 (inclusive within half a step).
inline std::vector<double> uniform_grid(double x0, double x1, double step) {
  if (!(step > 0.0) || !(x1 >= x0)) throw invalid_input("grid needs step > 0 and x1 >= x0");
  const auto count = static_cast<std::size_t>(std::floor((x1 - x0) / step + 0.5)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = x0 + step * static_cast<double>(i);
  return out;
}

namespace detail {

inline std::int64_t curve_weight(CurveKind kind, const NodalRow& row) {
  return kind == CurveKind::boundary_eta ? row.total_eta() : row.total_loops();
}

}  // namespace detail

// Exact running sums on the grid [x0, x1]. Degenerate eigenvalues contribute
// once per eigenfunction.
inline CumulativeCurve cumulative(CurveKind kind, const NodalSequence& seq, double step, double x0,
                                  double x1) {
  if (seq.min_lambda > 5) throw invalid_input("cumulative curves need the sequence from N = 1");
  CumulativeCurve c;
  c.kind = kind;
  c.x0 = x0;
  c.step = step;
  c.x = uniform_grid(x0, x1, step);
  c.values.resize(c.x.size());

  if (kind == CurveKind::loops_by_index) {
    const double n_max = weyl_index(c.x.back());
    if (n_max > static_cast<double>(seq.rows.size())) {
      throw invalid_input("q grid exceeds the sequence: need N up to " + std::to_string(n_max));
    }
    std::int64_t running = 0;
    std::size_t next = 0;
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      const auto upto = static_cast<std::size_t>(std::floor(weyl_index(c.x[i])));
      while (next < upto) running += seq.rows[next++].total_loops();
      c.values[i] = running;
    }
    return c;
  }

  if (x1 * x1 > static_cast<double>(seq.max_lambda)) {
    throw invalid_input("k grid exceeds the sequence cutoff sqrt(" + std::to_string(seq.max_lambda) + ")");
  }
  std::int64_t running = 0;
  std::size_t next = 0;
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    const double k = c.x[i];
    // k_n <= k  <=>  lambda_n <= floor(k^2), up to the rounding of k^2.
    const auto bound = k < 0.0 ? std::int64_t{-1} : static_cast<std::int64_t>(std::floor(k * k));
    while (next < seq.rows.size() && seq.rows[next].lambda() <= bound) {
      running += detail::curve_weight(kind, seq.rows[next++]);
    }
    c.values[i] = running;
  }
  return c;
}

// Spectral counting function N(k) = #{n : k_n <= k}.
inline std::int64_t spectral_count(double k) {
  if (k < 0.0) return 0;
  return count_modes_upto(static_cast<std::int64_t>(std::floor(k * k)));
}

struct SmoothFit {
  int degree = 0;
  bool in_index = false;  // fitted in N = pi q^2 / 8 rather than in the curve variable
  double center = 0.0;    // fit variable is s = (u - center) / half_width
  double half_width = 1.0;
  std::vector<double> scaled_coefficients;  // in s
  std::vector<double> coefficients;         // monomial, in u
  double condition = 0.0;
  double fit_x0 = 0.0;
  double fit_x1 = 0.0;
  std::vector<double> x;         // abscissae of the fit window
  std::vector<double> residual;  // curve - fit on those abscissae

  double fit_variable(double x_value) const {
    return in_index ? weyl_index(x_value) : x_value;
  }
  double operator()(double x_value) const {
    const double s = (fit_variable(x_value) - center) / half_width;
    double acc = 0.0;
    for (auto it = scaled_coefficients.rbegin(); it != scaled_coefficients.rend(); ++it) acc = acc * s + *it;
    return acc;
  }
};

struct SmoothFitOptions {
  int degree = 4;
  bool in_index = false;
  std::optional<double> x0;  // default: lowest 10% of the range excluded
  std::optional<double> x1;
  double max_condition = 1e12;
};

inline SmoothFitOptions default_fit_options(CurveKind kind) {
  SmoothFitOptions o;
  if (kind == CurveKind::loops_by_index) {
    o.degree = 2;
    o.in_index = true;
  }
  return o;
}

namespace detail {

// Monomial coefficients of p((u - c)/h) given coefficients in s.
inline std::vector<double> unscale(const std::vector<double>& a, double c, double h) {
  const std::size_t d = a.size();
  std::vector<double> out(d, 0.0);
  // (u - c)^j / h^j expanded with binomial coefficients.
  for (std::size_t j = 0; j < d; ++j) {
    double binom = 1.0;
    for (std::size_t i = 0; i <= j; ++i) {
      // term: a_j / h^j * C(j,i) u^i (-c)^(j-i)
      out[i] += a[j] / std::pow(h, static_cast<double>(j)) * binom *
                std::pow(-c, static_cast<double>(j - i));
      binom = binom * static_cast<double>(j - i) / static_cast<double>(i + 1);
    }
  }
  return out;
}

}  // namespace detail

// Least-squares polynomial on samples (x, y).
inline SmoothFit fit_polynomial(const std::vector<double>& x, const std::vector<double>& y,
                                const SmoothFitOptions& opt) {
  if (x.size() != y.size()) throw invalid_input("fit needs matching x and y");
  if (opt.degree < 0) throw invalid_input("fit degree must be non-negative");
  const auto cols = static_cast<Eigen::Index>(opt.degree + 1);
  if (x.size() < static_cast<std::size_t>(10 * std::max(1, opt.degree))) {
    throw invalid_input("fit needs at least 10x degree samples");
  }
  SmoothFit f;
  f.degree = opt.degree;
  f.in_index = opt.in_index;
  double lo = f.fit_variable(x.front());
  double hi = f.fit_variable(x.back());
  f.center = 0.5 * (lo + hi);
  f.half_width = std::max(0.5 * (hi - lo), 1e-300);

  const auto rows = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double s = (f.fit_variable(x[i]) - f.center) / f.half_width;
    double p = 1.0;
    for (Eigen::Index j = 0; j < cols; ++j) {
      a(i, j) = p;
      p *= s;
    }
    b(i) = y[i];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  f.condition = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  if (!(f.condition < opt.max_condition)) {
    throw invalid_input("ill-conditioned smooth fit (condition " + std::to_string(f.condition) + ")");
  }
  const Eigen::VectorXd coef = svd.solve(b);
  f.scaled_coefficients.assign(coef.data(), coef.data() + coef.size());
  f.coefficients = detail::unscale(f.scaled_coefficients, f.center, f.half_width);
  f.fit_x0 = x.front();
  f.fit_x1 = x.back();
  f.x = x;
  f.residual.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) f.residual[i] = y[i] - f(x[i]);
  return f;
}

inline SmoothFit smooth_fit(const CumulativeCurve& curve, const SmoothFitOptions& opt) {
  if (curve.x.empty()) throw invalid_input("empty curve");
  const double lo = curve.x.front();
  const double hi = curve.x.back();
  const double x0 = opt.x0.value_or(lo + 0.1 * (hi - lo));
  const double x1 = opt.x1.value_or(hi);
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < curve.x.size(); ++i) {
    if (curve.x[i] >= x0 && curve.x[i] <= x1) {
      xs.push_back(curve.x[i]);
      ys.push_back(static_cast<double>(curve.values[i]));
    }
  }
  return fit_polynomial(xs, ys, opt);
}

// Least-squares slope of ln P against ln x over `samples` points in [x0, x1].
inline double log_log_slope(const SmoothFit& fit, double x0, double x1, int samples = 200) {
  if (!(x0 > 0.0) || !(x1 > x0)) throw invalid_input("log-log slope needs 0 < x0 < x1");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < samples; ++i) {
    const double x = x0 + (x1 - x0) * i / (samples - 1);
    const double p = fit(x);
    if (!(p > 0.0)) throw invalid_input("smooth part is not positive on the slope window");
    const double lx = std::log(x);
    const double ly = std::log(p);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = samples;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

enum class OrbitClass { family, isolated45, cathetus };

inline const char* to_string(OrbitClass c) {
  switch (c) {
    case OrbitClass::family: return "family";
    case OrbitClass::isolated45: return "isolated45";
    case OrbitClass::cathetus: return "cathetus";
  }
  return "?";
}

struct OrbitLength {
  double length = 0.0;
  OrbitClass kind = OrbitClass::family;
  std::int64_t p = 0;  // family: (p, q) with p >= q >= 0; isolated: repetition count in p
  std::int64_t q = 0;
};

struct OrbitTable {
  double max_length = 0.0;
  std::vector<OrbitLength> entries;  // sorted by length, then class
};

// Family lengths 2 pi sqrt(p^2+q^2), one entry per distinct p^2+q^2;
// isolated 45-degree orbits sqrt(2) pi n; cathetus orbits 2 pi n.
inline OrbitTable orbit_table(double max_length) {
  constexpr double pi = std::numbers::pi;
  if (!(max_length > 2.0 * pi)) throw invalid_input("orbit table needs max length > 2 pi");
  OrbitTable t;
  t.max_length = max_length;
  const auto r = static_cast<std::int64_t>(max_length / (2.0 * pi)) + 1;
  std::vector<char> seen(static_cast<std::size_t>(2 * r * r + 1), 0);
  for (std::int64_t p = 1; p <= r; ++p) {
    for (std::int64_t q = 0; q <= p; ++q) {
      const std::int64_t s = p * p + q * q;
      const double len = 2.0 * pi * std::sqrt(static_cast<double>(s));
      if (len > max_length || seen[s]) continue;
      seen[s] = 1;
      t.entries.push_back({len, OrbitClass::family, p, q});
    }
  }
  for (std::int64_t n = 1; std::sqrt(2.0) * pi * n <= max_length; ++n) {
    t.entries.push_back({std::sqrt(2.0) * pi * n, OrbitClass::isolated45, n, 0});
  }
  for (std::int64_t n = 1; 2.0 * pi * n <= max_length; ++n) {
    t.entries.push_back({2.0 * pi * n, OrbitClass::cathetus, n, 0});
  }
  std::sort(t.entries.begin(), t.entries.end(), [](const OrbitLength& a, const OrbitLength& b) {
    if (std::abs(a.length - b.length) > 1e-9) return a.length < b.length;
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  });
  return t;
}

struct Peak {
  double length = 0.0;
  double power = 0.0;
  std::optional<OrbitLength> orbit;  // nearest table entry within tolerance
  // Every class whose length matches the peak's orbit length.
  std::vector<OrbitClass> classes;
};

struct PowerSpectrum {
  double window_x0 = 0.0;
  double window_x1 = 0.0;
  std::vector<double> lengths;
  std::vector<double> power;
  std::vector<Peak> peaks;
};

struct LengthGrid {
  double l0 = 0.0;
  double l1 = 40.0;
  double step = 0.005;
};

// |F(l)|^2 with F(l) = dx sum_i w_i r_i exp(-i l x_i) over samples inside the
// window, w a Hann taper across the window.
inline PowerSpectrum power_spectrum(const std::vector<double>& x, const std::vector<double>& residual,
                                    double x0, double x1, const LengthGrid& grid = {},
                                    unsigned workers = 1) {
  if (x.size() != residual.size()) throw invalid_input("residual and abscissae differ in size");
  if (!(x1 > x0)) throw invalid_input("empty transform window");
  const double l_top = std::max(std::abs(grid.l0), std::abs(grid.l1));
  if (l_top > 0.0 && (x1 - x0) < 2.0 * std::numbers::pi / l_top) {
    throw invalid_input("window shorter than one period of the largest length");
  }
  std::vector<double> xs;
  std::vector<double> fs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < x0 || x[i] > x1) continue;
    const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (x[i] - x0) / (x1 - x0)));
    xs.push_back(x[i]);
    fs.push_back(w * residual[i]);
  }
  if (xs.size() < 2) throw invalid_input("transform window holds fewer than two samples");
  const double dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);

  PowerSpectrum ps;
  ps.window_x0 = x0;
  ps.window_x1 = x1;
  ps.lengths = uniform_grid(grid.l0, grid.l1, grid.step);
  ps.power.assign(ps.lengths.size(), 0.0);
  parallel_chunks(ps.lengths.size(), workers, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t j = b; j < e; ++j) {
      const double l = ps.lengths[j];
      double re = 0.0;
      double im = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        re += fs[i] * std::cos(l * xs[i]);
        im -= fs[i] * std::sin(l * xs[i]);
      }
      re *= dx;
      im *= dx;
      ps.power[j] = re * re + im * im;
    }
  });
  return ps;
}

struct PeakOptions {
  double threshold_factor = 5.0;  // times the median power
  double min_length = 0.0;
};

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

// Strict local maxima above threshold_factor * median(power).
inline std::vector<Peak> detect_peaks(const PowerSpectrum& ps, const PeakOptions& opt = {}) {
  std::vector<Peak> out;
  const double threshold = opt.threshold_factor * median(ps.power);
  for (std::size_t i = 1; i + 1 < ps.power.size(); ++i) {
    const double p = ps.power[i];
    if (ps.lengths[i] < opt.min_length) continue;
    if (p > ps.power[i - 1] && p > ps.power[i + 1] && p > threshold) {
      out.push_back(Peak{ps.lengths[i], p, std::nullopt, {}});
    }
  }
  return out;
}

// Nearest orbit length within tolerance. Equal lengths in several classes
// are all listed; the reported orbit is the first by class order.
inline std::vector<Peak> match_peaks(std::vector<Peak> peaks, const OrbitTable& table, double tolerance) {
  for (auto& pk : peaks) {
    pk.orbit.reset();
    pk.classes.clear();
    const OrbitLength* best = nullptr;
    for (const auto& e : table.entries) {
      const double d = std::abs(e.length - pk.length);
      if (d > tolerance) continue;
      if (!best || d < std::abs(best->length - pk.length) - 1e-12) best = &e;
    }
    if (!best) continue;
    pk.orbit = *best;
    for (const auto& e : table.entries) {
      if (std::abs(e.length - best->length) < 1e-9) pk.classes.push_back(e.kind);
    }
  }
  return peaks;
}

inline void annotate(PowerSpectrum& ps, const OrbitTable& table, double tolerance,
                     const PeakOptions& opt = {}) {
  ps.peaks = match_peaks(detect_peaks(ps, opt), table, tolerance);
}

}  // namespace trinodal
