#include <gtest/gtest.h>

#include "adcalc/fit.hpp"
#include "adcalc/profiles.hpp"

using namespace adcalc;

TEST(Profiles, HProfileNormalised) {
  const auto h = BumpProfile::h_profile();
  EXPECT_NEAR(h.normalization_integral(), 1.0, 1e-10);
  EXPECT_EQ(h(0.0), 0.0);
  EXPECT_EQ(h(0.2), 0.0);
  EXPECT_EQ(h(4.5), 0.0);
  EXPECT_GT(h(1.0), 0.0);
  EXPECT_NO_THROW(h.validate());
}

TEST(Profiles, PsiWindowBothNormalisations) {
  for (auto n : {PsiNormalization::linear, PsiNormalization::square}) {
    const auto p = BumpProfile::psi_window(n);
    EXPECT_NEAR(p.normalization_integral(), 1.0, 1e-10);
    EXPECT_EQ(p(1.0), 0.0);
    EXPECT_EQ(p(2.0), 0.0);
    EXPECT_GT(p(1.4), 0.0);
    EXPECT_NO_THROW(p.validate());
  }
}

TEST(Profiles, ZeroPsiRejected) {
  auto p = BumpProfile::psi_window();
  p.scale = 0.0;
  try {
    p.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::profile);
  }
}

TEST(Profiles, ChiCutoff) {
  const auto c = BumpProfile::chi_cutoff(1.0, 2.0);
  EXPECT_EQ(c(0.0), 1.0);
  EXPECT_EQ(c(1.0), 1.0);
  EXPECT_EQ(c(2.0), 0.0);
  EXPECT_NEAR(c(1.5), 0.5, 1e-15);
  double prev = 1.0;
  for (double r = 1.0; r <= 2.0; r += 0.01) {
    EXPECT_LE(c(r), prev + 1e-15);
    prev = c(r);
  }
}

TEST(Profiles, SectionIdentityHoldsPointwise) {
  // int h(t^2 (1 + z^2)) dt/t = 1 for every z.
  const auto h = BumpProfile::h_profile();
  for (double z : {0.0, 0.5, 3.0, 40.0}) {
    double s = 0;
    const int n = 4000;
    const double a = std::log(1e-4), b = std::log(1e2), step = (b - a) / n;
    for (int i = 0; i <= n; ++i) {
      const double t = std::exp(a + i * step);
      s += ((i == 0 || i == n) ? 0.5 : 1.0) * h(t * t * (1 + z * z)) * step;
    }
    EXPECT_NEAR(s, 1.0, 1e-10);
  }
}

TEST(Fit, LineAndDecay) {
  std::vector<double> x = {1, 2, 3, 4}, y = {3, 5, 7, 9};
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.rms_residual, 0.0, 1e-14);

  std::vector<double> r, v;
  for (int k = 1; k <= 6; ++k) r.push_back(std::ldexp(1.0, -k)), v.push_back(std::pow(r.back(), 7));
  EXPECT_NEAR(decay_exponent(r, v, 0.0).slope, 7.0, 1e-12);
  EXPECT_TRUE(std::isinf(decay_exponent(r, std::vector<double>(6, 0.0), 0.0).slope));
}

TEST(Fit, ConvergenceOrder) {
  EXPECT_NEAR(convergence_order({128, 256, 512}, {1.0, 0.25, 0.0625}), 2.0, 1e-12);
  EXPECT_TRUE(strictly_decreasing({3, 2, 1}));
  EXPECT_FALSE(strictly_decreasing({3, 3, 1}));
}
