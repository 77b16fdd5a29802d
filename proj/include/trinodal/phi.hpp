#pragma once

// Point evaluation of phi_{m,n} at rational multiples of pi, with a sign
// that is either exact or certified against rounding error.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "trinodal/error.hpp"
#include "trinodal/modes.hpp"

namespace trinodal {

// (pi * x / den, pi * y / den)
struct RationalPoint {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t den = 1;
};

enum class SignCertificate { exact, double_precision, extended_precision };

struct PhiValue {
  double value = 0.0;
  int sign = 0;
  SignCertificate certificate = SignCertificate::exact;
};

namespace detail {

// Residue of k*x modulo 2*den, in [0, 2*den).
inline std::int64_t turn_residue(std::int64_t k, std::int64_t x, std::int64_t den) {
  const __int128 period = static_cast<__int128>(2) * den;
  __int128 r = (static_cast<__int128>(k) * x) % period;
  if (r < 0) r += period;
  return static_cast<std::int64_t>(r);
}

// Sign of sin(pi * r / den) for r in [0, 2*den).
inline int sin_sign_reduced(std::int64_t r, std::int64_t den) {
  if (r == 0 || r == den) return 0;
  return r < den ? 1 : -1;
}

// Sign of sin(pi * num / den), exact.
inline int sin_sign(std::int64_t num, std::int64_t den) {
  return sin_sign_reduced(turn_residue(1, num, den), den);
}

// sin(pi * r / den) for r in [0, 2*den), reduced to the first quadrant
// so that large k*x lose no accuracy.
template <class Real>
Real sin_pi_fraction(std::int64_t r, std::int64_t den) {
  using std::sin;
  int sign = 1;
  if (r >= den) {
    r -= den;
    sign = -1;
  }
  // sin(pi r/den) = sin(pi (den - r)/den)
  if (2 * r > den) r = den - r;
  const Real pi = boost::math::constants::pi<Real>();
  const Real v = sin(pi * Real(r) / Real(den));
  return sign > 0 ? v : -v;
}

}  // namespace detail

// Exact signs of the two product terms phi1 = sin(mx)sin(ny) and
// phi2 = sin(nx)sin(my) at a rational point.
struct TermSigns {
  int first = 0;
  int second = 0;
};

inline TermSigns term_signs(const ModePair& mode, const RationalPoint& p) {
  using detail::sin_sign_reduced;
  using detail::turn_residue;
  const int smx = sin_sign_reduced(turn_residue(mode.m, p.x, p.den), p.den);
  const int sny = sin_sign_reduced(turn_residue(mode.n, p.y, p.den), p.den);
  const int snx = sin_sign_reduced(turn_residue(mode.n, p.x, p.den), p.den);
  const int smy = sin_sign_reduced(turn_residue(mode.m, p.y, p.den), p.den);
  return {smx * sny, snx * smy};
}

template <class Real>
Real phi_terms(const ModePair& mode, const RationalPoint& p, Real& magnitude) {
  using detail::sin_pi_fraction;
  using detail::turn_residue;
  using std::abs;
  const Real smx = sin_pi_fraction<Real>(turn_residue(mode.m, p.x, p.den), p.den);
  const Real sny = sin_pi_fraction<Real>(turn_residue(mode.n, p.y, p.den), p.den);
  const Real snx = sin_pi_fraction<Real>(turn_residue(mode.n, p.x, p.den), p.den);
  const Real smy = sin_pi_fraction<Real>(turn_residue(mode.m, p.y, p.den), p.den);
  const Real a = smx * sny;
  const Real b = snx * smy;
  magnitude = abs(a) + abs(b);
  return a - b;
}

// phi_{m,n} at p. The sign is exact whenever the two product terms differ in
// sign or one vanishes; otherwise the double value is trusted only above a
// rounding bound and is re-evaluated with 50 decimal digits below it.
inline PhiValue eval_phi(const ModePair& mode, const RationalPoint& p) {
  require_valid(mode);
  if (p.den <= 0) throw invalid_input("rational point needs a positive denominator");
  PhiValue out;
  double magnitude = 0.0;
  out.value = phi_terms<double>(mode, p, magnitude);

  const TermSigns ts = term_signs(mode, p);
  if (ts.first != ts.second || ts.first == 0) {
    out.sign = ts.first > ts.second ? 1 : (ts.first < ts.second ? -1 : 0);
    out.certificate = SignCertificate::exact;
    if (out.sign == 0) out.value = 0.0;
    return out;
  }

  constexpr double kRelBound = 64.0 * std::numeric_limits<double>::epsilon();
  if (std::abs(out.value) > kRelBound * magnitude) {
    out.sign = out.value > 0 ? 1 : -1;
    out.certificate = SignCertificate::double_precision;
    return out;
  }

  // Same signs and the same pair of |sin| factors: the terms cancel exactly.
  // This covers the diagonal x = y among others.
  auto folded = [&](std::int64_t k, std::int64_t x) {
    const std::int64_t r = detail::turn_residue(k, x, p.den) % p.den;
    return std::min(r, p.den - r);
  };
  std::array<std::int64_t, 2> first{folded(mode.m, p.x), folded(mode.n, p.y)};
  std::array<std::int64_t, 2> second{folded(mode.n, p.x), folded(mode.m, p.y)};
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  if (first == second) {
    out.value = 0.0;
    out.sign = 0;
    out.certificate = SignCertificate::exact;
    return out;
  }

  using Wide = boost::multiprecision::cpp_bin_float_50;
  Wide wide_magnitude;
  const Wide wide = phi_terms<Wide>(mode, p, wide_magnitude);
  const Wide bound = Wide("1e-45") * wide_magnitude;
  if (abs(wide) <= bound) {
    throw uncertified_sign("cannot certify sign of phi" + to_string(mode) + " at (" +
                           std::to_string(p.x) + "," + std::to_string(p.y) + ")/" +
                           std::to_string(p.den));
  }
  out.value = wide.convert_to<double>();
  out.sign = wide > 0 ? 1 : -1;
  out.certificate = SignCertificate::extended_precision;
  return out;
}

// Plain double evaluation at a real point (x, y).
inline double phi(const ModePair& mode, double x, double y) {
  const double m = static_cast<double>(mode.m);
  const double n = static_cast<double>(mode.n);
  return std::sin(m * x) * std::sin(n * y) - std::sin(n * x) * std::sin(m * y);
}

}  // namespace trinodal
