#include <gtest/gtest.h>

#include <random>

#include "adcalc/family.hpp"
#include "adcalc/geometry.hpp"
#include "adcalc/grid.hpp"

using namespace adcalc;

TEST(Chart, UnitsMapToUnits) {
  const auto g = theta_chart(0.3, 0.0);
  EXPECT_EQ(g.x, 0.3);
  EXPECT_EQ(g.y, 0.3);
}

TEST(Chart, AffineFormula) {
  const auto g = theta_chart(1.0, 0.5);
  EXPECT_EQ(g.x, 1.0);
  EXPECT_EQ(g.y, 0.5);
}

TEST(Chart, RoundTripRandom) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = d(rng), u = d(rng);
    const auto v = theta_chart_inverse(theta_chart(x, u));
    EXPECT_EQ(v.x, x);
    EXPECT_NEAR(v.u, u, 1e-14 * std::max(1.0, std::abs(x)));
  }
}

TEST(Chart, DomainError) {
  Chart c(GroupoidSpec{}, 2.0);
  EXPECT_NO_THROW(c.theta(0.0, 1.9));
  try {
    c.theta(0.0, 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::domain);
  }
  EXPECT_THROW(big_theta(0.0, 30.0, 0.1, c), Error);
}

TEST(BigTheta, ZeroFiberIsAlgebroid) {
  const auto p = big_theta(0.4, 2.0, 0.0);
  ASSERT_TRUE(p.on_algebroid());
  EXPECT_EQ(p.vector().x, 0.4);
  EXPECT_EQ(p.vector().u, 2.0);
}

TEST(BigTheta, Formula) {
  const auto p = big_theta(0.0, 1.0, 0.1);
  ASSERT_FALSE(p.on_algebroid());
  EXPECT_EQ(p.t, 0.1);
  EXPECT_EQ(p.element().x, 0.0);
  EXPECT_DOUBLE_EQ(p.element().y, -0.1);
}

TEST(BigTheta, ContinuityAlongDyadicT) {
  const double x = 0.7, u = 3.0;
  double prev = 1e300;
  for (int k = 1; k <= 40; ++k) {
    const auto p = big_theta(x, u, std::ldexp(1.0, -k));
    const double dev = std::abs(p.element().y - x);
    EXPECT_LT(dev, prev);
    prev = dev;
  }
  EXPECT_LT(prev, 1e-11);
}

TEST(BigTheta, MatchesScaledChart) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double x = d(rng), u = d(rng), t = std::abs(d(rng)) + 0.01;
    const auto p = big_theta(x, u, t);
    const auto g = theta_chart(x, t * u);
    EXPECT_EQ(p.element(), g);
    EXPECT_EQ(p.t, t);
  }
}

TEST(AlphaAct, Identity) {
  const auto a = DncPoint::at(0.5, 1.0, 2.0);
  const auto b = alpha_act(1.0, a);
  EXPECT_EQ(b.t, a.t);
  EXPECT_EQ(b.element(), a.element());
  const auto z = alpha_act(1.0, DncPoint::at_zero(1.0, 2.0));
  EXPECT_EQ(z.vector().u, 2.0);
}

TEST(AlphaAct, ZeroFiberFormula) {
  const auto q = alpha_act(2.0, DncPoint::at_zero(0.0, 3.0));
  EXPECT_EQ(q.t, 0.0);
  EXPECT_EQ(q.vector().x, 0.0);
  EXPECT_EQ(q.vector().u, 1.5);
}

TEST(AlphaAct, GroupLaw) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-4.0, 4.0), s(0.1, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double u = s(rng), v = s(rng);
    const DncPoint p = (i % 2) ? DncPoint::at(s(rng), d(rng), d(rng)) : DncPoint::at_zero(d(rng), d(rng));
    const auto a = alpha_act(u, alpha_act(v, p));
    const auto b = alpha_act(u * v, p);
    EXPECT_NEAR(a.t, b.t, 1e-14 * std::abs(b.t));
    if (p.on_algebroid()) {
      EXPECT_NEAR(a.vector().u, b.vector().u, 1e-14 * std::abs(b.vector().u));
    } else {
      EXPECT_EQ(a.element(), b.element());
    }
  }
}

TEST(AlphaAct, RejectsNonPositive) { EXPECT_THROW(alpha_act(0.0, DncPoint::at(1, 0, 0)), Error); }

// ---------------------------------------------------------------------------
// normal coordinates

TEST(NormalCoords, ZeroFamily) {
  const auto f = KernelFamily::zero();
  const auto s = normal_coords(f, {-1.0, 0.0, 1.0}, {-1.0, 0.0, 1.0}, {0.0, 0.5, 1.0});
  for (const auto& v : s.values) EXPECT_EQ(v, Complex(0.0));
}

TEST(NormalCoords, GaussianKernelIsTIndependent) {
  auto c = [](double x) { return 1.0 + 0.5 * std::exp(-x * x); };
  const auto f = from_kernel(GroupoidSpec{}, "gauss",
                             [c](double t, double x, double y) {
                               const double d = (x - y) / t;
                               return Complex(c(x) * std::exp(-d * d) / t);
                             },
                             0.01, 4.0, 8.0, 6.0);
  const auto xs = uniform_grid(-3, 3, 13), us = uniform_grid(-4, 4, 17);
  const std::vector<double> ts = {0.01, 0.1, 0.5, 1.0, 4.0};
  const auto s = normal_coords(f, xs, us, ts);
  for (std::size_t it = 0; it < ts.size(); ++it)
    for (std::size_t ix = 0; ix < xs.size(); ++ix)
      for (std::size_t iu = 0; iu < us.size(); ++iu) {
        const double want = c(xs[ix]) * std::exp(-us[iu] * us[iu]);
        EXPECT_NEAR(s.at(it, ix, iu).real(), want, 1e-12 * want);
      }
}

TEST(NormalCoords, KernelRoundTrip) {
  auto k = [](double t, double x, double y) {
    const double d = (x - y) / t;
    return Complex(std::exp(-d * d - 0.1 * x * x) / t, 0.2 * std::sin(x) * std::exp(-d * d) / t);
  };
  const auto f = from_kernel(GroupoidSpec{}, "k", k, 0.01, 4.0, 8.0, 6.0);
  const auto xs = uniform_grid(-2, 2, 9);
  for (double t : {0.05, 0.3, 1.7})
    for (double x : xs)
      for (double y : xs) {
        const Complex a = f.kernel(t, x, y), b = k(t, x, y);
        EXPECT_LE(std::abs(a - b), 1e-12 * std::max(std::abs(b), 1e-300) + 1e-300);
      }
}

TEST(NormalCoords, SupportEscape) {
  const auto f = from_kernel(GroupoidSpec{}, "k", [](double, double, double) { return Complex(0); }, 0.01, 4.0, 8.0,
                             6.0);
  Chart c(GroupoidSpec{}, 5.0);
  EXPECT_THROW(normal_coords(f, {0.0}, {0.0}, {0.5, 1.0}, c), Error);
}

TEST(Richardson, RecoversLimitOfQuadraticPolynomial) {
  auto fn = [](double t) { return 2.0 + 3.0 * t - 5.0 * t * t; };
  EXPECT_NEAR(richardson_zero(fn, 0.01), 2.0, 1e-13);
}

TEST(SampledFamily, InterpolatesSmoothField) {
  SampledField s;
  s.x = uniform_grid(-3, 3, 61);
  s.u = uniform_grid(-6, 6, 241);
  for (int k = -48; k <= 16; ++k) s.t.push_back(std::exp2(k / 8.0));
  s.values.resize(s.x.size() * s.u.size() * s.t.size());
  auto phi = [](double x, double u, double t) { return std::exp(-u * u - 0.2 * x * x) * (1.0 + 0.1 * t); };
  for (std::size_t it = 0; it < s.t.size(); ++it)
    for (std::size_t ix = 0; ix < s.x.size(); ++ix)
      for (std::size_t iu = 0; iu < s.u.size(); ++iu) s.at(it, ix, iu) = phi(s.x[ix], s.u[iu], s.t[it]);
  const KernelFamily f(GroupoidSpec{}, s, 3.0, 6.0);
  EXPECT_NEAR(f.phi(0.33, 0.71, 0.3).real(), phi(0.33, 0.71, 0.3), 1e-5);
  EXPECT_NEAR(f.phi_hat(0.0, 0.0, 0.25).real(), std::sqrt(kPi) * 1.025, 1e-10);
  EXPECT_NEAR(f.phi_hat0(0.0, 0.0).real(), std::sqrt(kPi), 1e-10);
}

// ---------------------------------------------------------------------------
// quadrature

TEST(Quadrature, ReproducesLogSpan) {
  for (auto rule : {QuadratureRule::log_trapezoidal, QuadratureRule::log_gauss_legendre}) {
    QuadratureSpec q;
    q.rule = rule;
    q.n_nodes = 40;
    double s = 0;
    for (double w : q.weights()) {
      EXPECT_GT(w, 0.0);
      s += w;
    }
    EXPECT_NEAR(s, q.log_span(), 1e-12);
    const auto t = q.nodes();
    for (std::size_t i = 1; i < t.size(); ++i) EXPECT_GT(t[i], t[i - 1]);
  }
}

TEST(Quadrature, GaussLegendreIntegratesPolynomials) {
  const auto [x, w] = QuadratureSpec::gauss_legendre_unit(10);
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], 18);
  EXPECT_NEAR(s, 2.0 / 19.0, 1e-14);
}

TEST(Quadrature, DefaultIsOctaveAligned) {
  const auto q = default_quadrature();
  ASSERT_TRUE(q.nodes_per_octave().has_value());
  EXPECT_EQ(*q.nodes_per_octave(), 8);
  EXPECT_EQ(*q.node_shift(2.0), 8);
  EXPECT_EQ(*q.node_shift(0.25), -16);
  EXPECT_FALSE(q.node_shift(3.0).has_value());
  EXPECT_EQ(*q.node_index(0.25), 80u);
}

TEST(Grid, FrequenciesAndMinimalImage) {
  GridSpec g(8.0, 16);
  EXPECT_DOUBLE_EQ(g.dx(), 1.0);
  EXPECT_DOUBLE_EQ(g.xi(1), kPi / 8.0);
  EXPECT_DOUBLE_EQ(g.xi(15), -kPi / 8.0);
  EXPECT_DOUBLE_EQ(g.minimal_image(15.0), -1.0);
  EXPECT_DOUBLE_EQ(g.minimal_image(-3.0), -3.0);
  EXPECT_THROW(GridSpec(8.0, 24), Error);
}
