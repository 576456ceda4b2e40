#include <gtest/gtest.h>

#include <cmath>

#include "adcalc/corpus.hpp"
#include "adcalc/quantization.hpp"
#include "support/oracles.hpp"

using namespace adcalc;

namespace {

GridSpec grid128() { return GridSpec(8.0, 128); }

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::io;  // sentinel: nothing thrown
}

double rel_l2(const Vector& a, const Vector& b) { return (a - b).norm() / b.norm(); }

const Complex I(0.0, 1.0);

}  // namespace

// ---------------------------------------------------------------------------
// ClassicalSymbol and kn_quantize

TEST(KnQuantize, UnitSymbolIsIdentity) {
  const auto g = grid128();
  const auto p = kn_quantize(ClassicalSymbol::constant(1.0), g);
  const Vector v = oracle::packet(g, 3.0, 1.0);
  EXPECT_LT(rel_l2(p.apply(v), v), 1e-10);
}

TEST(KnQuantize, FirstDerivative) {
  const auto g = grid128();
  const ClassicalSymbol d(1, {[](double, int s) { return I * static_cast<double>(s); }}, 0.0);
  const Vector v = sample_function(g, [](double x) { return Complex(std::exp(-x * x)); });
  const Vector want = sample_function(g, [](double x) { return Complex(-2.0 * x * std::exp(-x * x)); });
  EXPECT_LT(rel_l2(kn_quantize(d, g).apply(v), want), 1e-8);
}

TEST(KnQuantize, NegativeSecondDerivative) {
  const auto g = grid128();
  const ClassicalSymbol d(2, {[](double, int) { return Complex(1.0); }}, 0.0);
  const Vector v = sample_function(g, [](double x) { return Complex(std::exp(-x * x)); });
  const Vector want = sample_function(g, [](double x) { return Complex(-(4.0 * x * x - 2.0) * std::exp(-x * x)); });
  EXPECT_LT(rel_l2(kn_quantize(d, g).apply(v), want), 1e-7);
}

TEST(KnQuantize, SingularSymbolNeedsCutoff) {
  const auto g = grid128();
  const ClassicalSymbol step(0, {[](double, int s) { return Complex(s > 0 ? 1.0 : 0.0); }}, 0.0);
  EXPECT_EQ(kind_of([&] { (void)kn_quantize(step, g); }), ErrorKind::cutoff);
  const ClassicalSymbol inv(-1, {[](double, int) { return Complex(1.0); }}, 0.0);
  EXPECT_EQ(kind_of([&] { (void)kn_quantize(inv, g); }), ErrorKind::cutoff);
  const ClassicalSymbol smoothed(0, {[](double, int s) { return Complex(s > 0 ? 1.0 : 0.0); }}, 1.0);
  EXPECT_NO_THROW((void)kn_quantize(smoothed, g));
}

TEST(ClassicalSymbol, TermsAreHomogeneous) {
  const ClassicalSymbol a(1, {[](double x, int s) { return Complex(1.0 + x, s); },
                              [](double x, int) { return Complex(x * x); }},
                         0.5);
  for (double xi : {1.0, -2.5, 7.0})
    for (double s : {2.0, 3.5}) {
      EXPECT_NEAR(std::abs(a.term(0, 0.3, s * xi) - s * a.term(0, 0.3, xi)), 0.0, 1e-12 * std::abs(a.term(0, 0.3, s * xi)));
      EXPECT_NEAR(std::abs(a.term(1, 0.3, s * xi) - a.term(1, 0.3, xi)), 0.0, 1e-14);
    }
  EXPECT_EQ(a(0.1, 0.1), Complex(0.0));
}

// ---------------------------------------------------------------------------
// quantize_family

TEST(QuantizeFamily, ZeroAndPreconditions) {
  const auto g = grid128();
  const auto q = default_quadrature();
  const auto z = quantize_family(KernelFamily::zero(), 0, g, q);
  EXPECT_TRUE(z.op.is_zero());
  EXPECT_EQ(kind_of([&] { (void)quantize_family(corpus::gauss_s(), 0, g, q); }), ErrorKind::class_mismatch);
  QuadratureSpec shortq = octave_quadrature(-12, 0, 8);
  EXPECT_EQ(kind_of([&] { (void)quantize_family(corpus::psi_window({}, {}, shortq), 0, g, shortq); }),
            ErrorKind::tail);
}

TEST(QuantizeFamily, MatchesKohnNirenbergOracle) {
  const auto g = grid128();
  const auto q = default_quadrature();
  for (const auto& e : corpus::j_corpus()) {
    const auto p = quantize_family(e.family, 0, g, q);
    EXPECT_LT(p.tail_ratio, 1e-8);
    for (double om : {-6.0, 2.5, 9.0}) {
      const Vector v = oracle::packet(g, om, 1.5, 0.5);
      const auto on = oracle::spectral_support(g, v, 1e-9);
      const Vector want = oracle::kn_apply(
          g, [&](double x, double xi) { return oracle::quantization_symbol(e.family, 0, x, xi); }, v, on);
      EXPECT_LT(rel_l2(p.op.apply(v), want), 1e-3) << e.name << " omega " << om;
    }
  }
}

TEST(QuantizeFamily, OrderMinusOneScaling) {
  const auto g = GridSpec(16.0, 256);
  const auto f = corpus::psi_window();
  const auto p = quantize_family(f, 1, g, default_quadrature());
  const Vector a = oracle::packet(g, 6.0, 3.0), b = oracle::packet(g, 12.0, 3.0);
  const double ratio = (l2_norm(g, p.op.apply(a)) / l2_norm(g, a)) / (l2_norm(g, p.op.apply(b)) / l2_norm(g, b));
  EXPECT_NEAR(ratio, 2.0, 0.1);
}

TEST(QuantizeFamily, PartialSumsConvergeStrictly) {
  const auto g = grid128();
  const Vector v = oracle::packet(g, 4.0, 1.0);
  const auto ps = partial_sums(corpus::psi_window({{"amp", 0.5}}), 0, g, default_quadrature(), v);
  ASSERT_GE(ps.increment.size(), 4u);
  EXPECT_GT(ps.fit.slope, 1.0);
}

// ---------------------------------------------------------------------------
// principal_symbol and symbol_to_family

TEST(PrincipalSymbol, NormalizedWindowGivesOne) {
  const auto g = grid128();
  const auto s = principal_symbol(corpus::psi_window(), 0, g);
  EXPECT_LT((s.values.array() - 1.0).abs().maxCoeff(), 1e-8);
}

TEST(PrincipalSymbol, MellinClosedForm) {
  AnalyticGenerator gen;
  gen.name = "xi2-gauss";
  gen.phi_hat = [](double, double z, double t) { return Complex(z * z * std::exp(-z * z - t * t)); };
  const KernelFamily f({}, gen, std::ldexp(1.0, -12), 16.0, 8.0, 16.0, ClassTag::S_c);
  const auto g = grid128();
  SymbolOptions o;
  o.require_j = false;
  const auto s = principal_symbol(f, 0, g, o);
  EXPECT_LT((s.values.array() - 0.5).abs().maxCoeff(), 1e-8);
  EXPECT_EQ(kind_of([&] { (void)principal_symbol(f, 0, g); }), ErrorKind::class_mismatch);
}

TEST(PrincipalSymbol, ZeroFloorAndAlphaInvariance) {
  const auto g = grid128();
  EXPECT_EQ(principal_symbol(KernelFamily::zero(), 0, g).values.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(kind_of([&] { (void)principal_symbol(corpus::psi_window(), 0, {0.0}, {0.1}, g.frequency_floor()); }),
            ErrorKind::floor);
  for (const auto& e : corpus::j_corpus()) {
    const auto base = principal_symbol(e.family, 0, g);
    for (double u : {0.5, 2.0}) {
      const auto moved = principal_symbol(alpha_automorphism(e.family, u), 0, g);
      EXPECT_LT((moved.values - base.values).cwiseAbs().maxCoeff(), 1e-8) << e.name << " u " << u;
    }
    // and the principal symbol matches the declared cosphere values
    double err = 0.0;
    for (std::size_t i = 0; i < base.xs.size(); i += 9)
      for (std::size_t k = 0; k < base.xis.size(); ++k)
        err = std::max(err, std::abs(base.values(static_cast<long>(i), static_cast<long>(k)) -
                                     e.sigma0(base.xs[i], base.xis[k] > 0 ? 1 : -1)));
    EXPECT_LT(err, 1e-6) << e.name;
  }
}

TEST(PrincipalSymbol, Linear) {
  const auto g = grid128();
  const auto a = corpus::psi_window({{"amp", 0.5}});
  const auto b = corpus::gauss_flat({{"beta", 0.5}});
  AnalyticGenerator gen;
  gen.phi_hat = [a, b](double x, double z, double t) { return 2.0 * a.phi_hat(x, z, t) - 3.0 * b.phi_hat(x, z, t); };
  const KernelFamily sum({}, gen, a.t_min(), a.t_max(), 8.0, 64.0, ClassTag::J);
  const auto sa = principal_symbol(a, 0, g), sb = principal_symbol(b, 0, g), ss = principal_symbol(sum, 0, g);
  EXPECT_LT((ss.values - (2.0 * sa.values - 3.0 * sb.values)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SymbolToFamily, RoundTrips) {
  const auto g = grid128();
  const auto psi = BumpProfile::psi_window();
  const auto one = symbol_to_family([](double, int) { return Complex(1.0); }, psi);
  EXPECT_EQ(one.claimed_class(), ClassTag::J);
  EXPECT_LT((principal_symbol(one, 0, g).values.array() - 1.0).abs().maxCoeff(), 1e-6);
  const auto hardy = symbol_to_family([](double, int s) { return Complex(s > 0 ? 1.0 : 0.0); }, psi);
  const auto sh = principal_symbol(hardy, 0, g);
  double err = 0.0;
  for (long i = 0; i < sh.values.rows(); ++i)
    for (std::size_t k = 0; k < sh.xis.size(); ++k)
      err = std::max(err, std::abs(sh.values(i, static_cast<long>(k)) - (sh.xis[k] > 0 ? 1.0 : 0.0)));
  EXPECT_LT(err, 1e-6);
  EXPECT_TRUE(symbol_to_family([](double, int) { return Complex(0.0); }, psi).known_zero());
  BumpProfile bad = psi;
  bad.scale *= 2.0;
  EXPECT_EQ(kind_of([&] { (void)symbol_to_family([](double, int) { return Complex(1.0); }, bad); }),
            ErrorKind::profile);
}

// ---------------------------------------------------------------------------
// asymptotic_symbol

TEST(AsymptoticSymbol, UIndependentFamilyHasOneTerm) {
  const std::vector<double> xs = {-1.0, 0.0, 0.7};
  const std::vector<double> xis = {-5.0, -2.0, 2.0, 3.0, 8.0};
  for (int m : {0, 1}) {
    const auto terms = asymptotic_symbol(corpus::psi_window(), m, 2, xs, xis, 0.5);
    ASSERT_EQ(terms.size(), 3u);
    for (std::size_t c = 0; c < xis.size(); ++c) {
      const double want = m == 0 ? 1.0 : std::abs(oracle::quantization_symbol(corpus::psi_window(), 1, 0.0, xis[c], std::log(2.0) / 16.0));
      EXPECT_NEAR(terms[0].values.values(1, static_cast<long>(c)).real(), want, 1e-8);
    }
    EXPECT_LT(terms[1].values.values.cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT(terms[2].values.values.cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_EQ(terms[0].degree, -m);
    EXPECT_LT(terms[0].homogeneity_error, 1e-2);
  }
}

TEST(AsymptoticSymbol, FirstOrderTermMatchesDirectQuadrature) {
  const auto f = corpus::psi_window({{"rho_amp", 1.0}});
  const auto psi = BumpProfile::psi_window();
  const std::vector<double> xs = {0.0};
  const std::vector<double> xis = {-3.0, 2.0, 5.0};
  for (int m : {0, 1}) {
    const auto terms = asymptotic_symbol(f, m, 1, xs, xis, 0.5);
    for (std::size_t c = 0; c < xis.size(); ++c) {
      const double a = std::abs(xis[c]);
      const Complex want = oracle::composite_gk(
          [&](double y) {
            const double t = std::exp(y), s = t * a;
            return Complex(std::pow(t, m + 1) * s * log_bump((s - 1.5) / 1.5, 1.0) * psi(s));
          },
          std::log(0.5 / a), std::log(4.0 / a), std::log(2.0) / 8.0);
      EXPECT_NEAR(std::abs(terms[1].values.values(0, static_cast<long>(c)) - want), 0.0, 1e-8 * std::abs(want));
    }
    EXPECT_LT(terms[1].homogeneity_error, 1e-2);
  }
}

TEST(AsymptoticSymbol, ZeroFamily) {
  const auto terms = asymptotic_symbol(KernelFamily::zero(), 0, 3, {0.0}, {2.0, -2.0}, 1.0);
  ASSERT_EQ(terms.size(), 4u);
  for (const auto& t : terms) EXPECT_EQ(t.values.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(AsymptoticSymbol, UnstableFitReported) {
  AnalyticGenerator gen;
  gen.phi_hat = [](double, double z, double u) { return Complex(std::exp(-z * z) * std::sqrt(u) * z * z); };
  const KernelFamily f({}, gen, std::ldexp(1.0, -12), 16.0, 8.0, 16.0, ClassTag::J);
  EXPECT_EQ(kind_of([&] { (void)asymptotic_symbol(f, 0, 1, {0.0}, {2.0}, 1.0); }), ErrorKind::unstable_fit);
}

// ---------------------------------------------------------------------------
// composition and module action

TEST(Composition, LeadingSymbolIsMultiplicative) {
  const auto g = GridSpec(8.0, 256);
  const auto q = default_quadrature();
  const auto fa = corpus::psi_window({{"amp", 0.5}});
  const auto fb = corpus::psi_window({{"amp", 0.3}, {"w_plus", 1.0}, {"w_minus", 0.3}});
  const auto pa = quantize_family(fa, 0, g, q).op, pb = quantize_family(fb, 0, g, q).op;
  const auto sym = pa.compose(pb).probe_symbol();
  const auto sa = principal_symbol(fa, 0, g), sb = principal_symbol(fb, 0, g);
  double err = 0.0;
  for (std::size_t c = 0; c < sa.xis.size(); ++c) {
    const double a = std::abs(sa.xis[c]);
    if (a < g.nyquist() / 8.0 || a > g.nyquist() / 2.0) continue;
    long k = std::lround(sa.xis[c] / g.dxi());
    if (k < 0) k += static_cast<long>(g.n);
    for (std::size_t j = 0; j < g.n; ++j) {
      const Complex want = sa.values(static_cast<long>(j), static_cast<long>(c)) *
                           sb.values(static_cast<long>(j), static_cast<long>(c));
      err = std::max(err, std::abs(sym(static_cast<long>(j), k) - want) / std::abs(want));
    }
  }
  EXPECT_LT(err, 0.02);
}

TEST(ModuleAction, IdentityAndHighPass) {
  const auto g = GridSpec(8.0, 256);
  const auto q = default_quadrature();
  const auto fam = corpus::psi_window({{"amp", 0.5}});
  const auto f = realize(fam, g, q).materialize();
  ModuleActionOptions opt;
  opt.t0 = 1.0 / 16.0;
  const auto id = module_action(f, QuantizedOperator::from_symbol(ClassicalSymbol::constant(1.0), g), opt);
  EXPECT_LT(relative_difference(id.h.node(90).kernel(), f.node(90).kernel()), 1e-12);
  ASSERT_TRUE(id.relation.has_value());
  EXPECT_LT(id.relation->max_deviation, 1e-3);
  const auto hp = module_action(f, QuantizedOperator::from_symbol(ClassicalSymbol::high_pass(1.0), g), opt);
  EXPECT_LT(hp.relation->max_deviation, 1e-3);
  const auto rel = fiber_relation(f, hp.h, [](double, int) { return Complex(1.0); }, opt,
                                  [&](double x, double z) { return fam.phi_hat0(x, z); });
  EXPECT_LT(rel.max_deviation, 1e-3);
}

TEST(ModuleAction, Preconditions) {
  const auto g = GridSpec(8.0, 64);
  const auto q = octave_quadrature(-8, 2, 8);
  const auto f = realize(corpus::psi_window(), g, q);
  const ClassicalSymbol d(1, {[](double, int s) { return I * static_cast<double>(s); }}, 0.0);
  EXPECT_EQ(kind_of([&] { (void)module_action(f, QuantizedOperator::from_symbol(d, g)); }), ErrorKind::symbol_order);
  const auto s = realize(corpus::gauss_s(), g, q);
  EXPECT_EQ(kind_of([&] { (void)module_action(s, QuantizedOperator::from_symbol(ClassicalSymbol::constant(1.0), g)); }),
            ErrorKind::class_mismatch);
}
