#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "trinodal/phi.hpp"

using namespace trinodal;

TEST(Phi, ClosedFormValue) {
  // phi_{2,1}(pi/2, pi/4) = sin(pi) sin(pi/4) - sin(pi/2) sin(pi/2) = -1.
  const PhiValue v = eval_phi({2, 1}, {2, 1, 4});
  EXPECT_NEAR(v.value, -1.0, 1e-15);
  EXPECT_EQ(v.sign, -1);
  EXPECT_NEAR(phi({2, 1}, std::numbers::pi / 2, std::numbers::pi / 4), -1.0, 1e-15);
}

TEST(Phi, VanishesOnTheDiagonalExactly) {
  for (std::int64_t t = 1; t < 40; ++t) {
    const PhiValue v = eval_phi({9, 4}, {t, t, 40});
    EXPECT_EQ(v.sign, 0);
    EXPECT_EQ(v.certificate, SignCertificate::exact);
  }
}

TEST(Phi, CancellingTermsAreExactZeros) {
  // At (17pi/72, pi/72): sin(9x) = sin(pi/8), sin(4y) = sin(pi/18),
  // sin(4x) = sin(pi/18), sin(9y) = sin(pi/8). Neither term vanishes.
  const PhiValue v = eval_phi({9, 4}, {17, 1, 72});
  EXPECT_EQ(v.sign, 0);
  EXPECT_EQ(v.certificate, SignCertificate::exact);
  EXPECT_NE(term_signs({9, 4}, {17, 1, 72}).first, 0);
}

TEST(Phi, VanishesOnTheCathetiExactly) {
  EXPECT_EQ(eval_phi({9, 4}, {13, 0, 20}).sign, 0);
  EXPECT_EQ(eval_phi({9, 4}, {20, 7, 20}).sign, 0);
}

TEST(Phi, SinSignByResidue) {
  EXPECT_EQ(detail::sin_sign(1, 2), 1);   // sin(pi/2)
  EXPECT_EQ(detail::sin_sign(3, 2), -1);  // sin(3pi/2)
  EXPECT_EQ(detail::sin_sign(4, 2), 0);   // sin(2pi)
  EXPECT_EQ(detail::sin_sign(-1, 3), -1);
}

TEST(Phi, AgreesWithPlainEvaluationAtRandomPoints) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> pick(0, 9999);
  const ModePair mode{23, 8};
  for (int i = 0; i < 5000; ++i) {
    std::int64_t x = pick(rng), y = pick(rng);
    if (y > x) std::swap(x, y);
    const PhiValue v = eval_phi(mode, {x, y, 10000});
    const double direct = phi(mode, std::numbers::pi * x / 10000.0, std::numbers::pi * y / 10000.0);
    EXPECT_NEAR(v.value, direct, 1e-12);
    if (std::abs(direct) > 1e-9) EXPECT_EQ(v.sign, direct > 0 ? 1 : -1);
  }
}

TEST(Phi, TermSignsAreExactOnGridLines) {
  // x = pi/2 is a zero line of sin(2x): the first term of phi_{2,1} vanishes.
  const TermSigns s = term_signs({2, 1}, {2, 1, 4});
  EXPECT_EQ(s.first, 0);
  EXPECT_EQ(s.second, 1);
}
