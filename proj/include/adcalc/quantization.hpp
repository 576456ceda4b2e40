#pragma once

#include <Eigen/QR>
#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <vector>

#include "adcalc/algebra.hpp"
#include "adcalc/family.hpp"
#include "adcalc/symbol.hpp"

namespace adcalc {

inline bool tagged_j(const KernelFamily& f) {
  if (f.known_zero()) return true;
  const auto c = f.claimed_class();
  return c && (*c == ClassTag::J || *c == ClassTag::J0);
}

inline bool tagged_j(const GridFamily& f) { return f.tag() == ClassTag::J || f.tag() == ClassTag::J0; }

struct QuantizeOptions {
  double tail_tolerance = 1e-8;
};

struct QuantizeResult {
  DiscreteOperator op;
  double tail_ratio = 0.0;
  std::vector<double> node_sup;  // sup |t^m phi_hat(x_j, t xi_k, t)| per node
};

// Symbol of sum_i w_i t_i^m f_{t_i} on the frequency bins.
inline Complex quantized_symbol(const KernelFamily& f, int m, const std::vector<double>& ts,
                                const std::vector<double>& ws, double x, double xi) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const Complex v = f.phi_hat(x, ts[i] * xi, ts[i]);
    if (v != Complex(0.0)) s += ws[i] * std::pow(ts[i], m) * v;
  }
  return s;
}

// P_f = int t^m f_t dt/t by the quadrature rule; requires a J family.
inline QuantizeResult quantize_family(const KernelFamily& f, int m, const GridSpec& g, const QuadratureSpec& q,
                                      const QuantizeOptions& opt = {}) {
  require(m >= 0, ErrorKind::domain, "m must be a nonnegative integer");
  require(tagged_j(f), ErrorKind::class_mismatch, "quantize_family needs a family tagged J");
  g.validate();
  q.validate();
  QuantizeResult r;
  if (f.known_zero()) {
    r.op = DiscreteOperator::zero(g);
    r.node_sup.assign(q.n_nodes, 0.0);
    return r;
  }
  const auto ts = q.nodes();
  const auto ws = q.weights();
  r.node_sup.assign(ts.size(), 0.0);
  parallel_for(ts.size(), [&](std::size_t i) {
    double s = 0.0;
    const double tm = std::pow(ts[i], m);
    for (std::size_t j = 0; j < g.n; ++j)
      for (std::size_t k = 0; k < g.n; ++k) s = std::max(s, tm * std::abs(f.phi_hat(g.x(j), ts[i] * g.xi(k), ts[i])));
    r.node_sup[i] = s;
  });
  double total = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) total += ws[i] * r.node_sup[i];
  const double tail = r.node_sup.front() + r.node_sup.back();
  r.tail_ratio = total > 0.0 ? tail / total : 0.0;
  require(r.tail_ratio <= opt.tail_tolerance, ErrorKind::tail,
          "t^m |f_t| has mass at the quadrature ends: ratio " + std::to_string(r.tail_ratio));
  if (total == 0.0) {
    r.op = DiscreteOperator::zero(g);
    return r;
  }
  r.op = DiscreteOperator::from_symbol(g, [&](std::size_t j, double xi) {
    return quantized_symbol(f, m, ts, ws, g.x(j), xi);
  });
  return r;
}

struct PartialSums {
  std::vector<double> s;          // lower limits t_min 2^k
  std::vector<double> increment;  // |S_{s_k} g - S_{s_{k+1}} g|_2
  DecayFit fit;                   // increments against s
};

// S_s g = sum_{t_i >= s} w_i t_i^m f_{t_i} g, sampled once per octave.
inline PartialSums partial_sums(const KernelFamily& f, int m, const GridSpec& g, const QuadratureSpec& q,
                                const Vector& v, double floor = 1e-14) {
  require(tagged_j(f), ErrorKind::class_mismatch, "partial sums need a family tagged J");
  const auto per = q.nodes_per_octave();
  require(per.has_value(), ErrorKind::grid_mismatch, "partial sums need dyadic-aligned nodes");
  const auto ts = q.nodes();
  const auto ws = q.weights();
  const std::size_t n = g.n;
  std::vector<Complex> vin(v.data(), v.data() + n), vhat(n);
  fft::forward(vin.data(), vhat.data(), n);
  // contribution of node i applied to v
  auto node_apply = [&](std::size_t i) {
    Vector out = Vector::Zero(static_cast<long>(n));
    if (f.known_zero()) return out;
    const double tm = std::pow(ts[i], m);
    parallel_for(n, [&](std::size_t j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const Complex a = k == n / 2 ? 0.5 * (f.phi_hat(g.x(j), ts[i] * g.nyquist(), ts[i]) +
                                              f.phi_hat(g.x(j), -ts[i] * g.nyquist(), ts[i]))
                                     : f.phi_hat(g.x(j), ts[i] * g.xi(k), ts[i]);
        if (a == Complex(0.0)) continue;
        s += a * vhat[k] * std::polar(1.0, kTwoPi * static_cast<double>((j * k) % n) / static_cast<double>(n));
      }
      out(static_cast<long>(j)) = s * tm / static_cast<double>(n);
    });
    return out;
  };
  PartialSums r;
  Vector acc = Vector::Zero(static_cast<long>(n));
  Vector last = acc;
  const std::size_t p = static_cast<std::size_t>(*per);
  for (std::size_t ii = ts.size(); ii-- > 0;) {
    acc += ws[ii] * node_apply(ii);
    if (ii % p == 0) {
      if (ii + p < ts.size()) {
        r.s.push_back(ts[ii]);
        r.increment.push_back(l2_norm(g, acc - last));
      }
      last = acc;
    }
  }
  double peak = 0.0;
  for (double e : r.increment) peak = std::max(peak, e);
  r.fit = decay_exponent(r.s, r.increment, floor * std::max(peak, 1e-300));
  return r;
}

struct SymbolTable {
  std::vector<double> xs;
  std::vector<double> xis;
  Matrix values;  // [x][xi]
};

struct SymbolOptions {
  int per_octave = 64;
  double s_lo = std::ldexp(1.0, -26);
  double s_hi = std::ldexp(1.0, 26);
  std::optional<double> floor;  // defaults to the grid frequency floor
  bool require_j = true;
  double tail_tolerance = 1e-10;
};

namespace detail {

inline QuadratureSpec s_quadrature(const SymbolOptions& opt) {
  QuadratureSpec q;
  q.t_min = opt.s_lo;
  q.t_max = opt.s_hi;
  q.n_nodes = static_cast<std::size_t>(std::lround(std::log2(opt.s_hi / opt.s_lo) * opt.per_octave)) + 1;
  return q;
}

// int_0^inf s^p F(s) ds/s on the log-trapezoid rule, with tail ratio.
inline std::pair<Complex, double> mellin(const std::function<Complex(double)>& fn, double p, const QuadratureSpec& q) {
  const auto s = q.nodes();
  const auto w = q.weights();
  Complex acc = 0.0;
  double mass = 0.0;
  std::vector<double> mags(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Complex v = std::pow(s[i], p) * fn(s[i]);
    mags[i] = std::abs(v);
    acc += w[i] * v;
    mass += w[i] * mags[i];
  }
  const double tail = mags.front() + mags.back();
  return {acc, mass > 0.0 ? tail / mass : 0.0};
}

}  // namespace detail

// sigma(x, xi) = int_0^inf t^m fhat_0(x, t xi) dt/t = |xi|^{-m} int s^m fhat_0(x, s sign xi) ds/s.
inline SymbolTable principal_symbol(const KernelFamily& f, int m, const std::vector<double>& xs,
                                    const std::vector<double>& xis, double floor, const SymbolOptions& opt = {}) {
  require(m >= 0, ErrorKind::domain, "m must be a nonnegative integer");
  if (opt.require_j) require(tagged_j(f), ErrorKind::class_mismatch, "principal_symbol needs a family tagged J");
  for (double xi : xis)
    require(std::abs(xi) >= floor, ErrorKind::floor,
            "|xi| = " + std::to_string(std::abs(xi)) + " is below the frequency floor " + std::to_string(floor));
  SymbolTable r{xs, xis, Matrix::Zero(static_cast<long>(xs.size()), static_cast<long>(xis.size()))};
  if (f.known_zero()) return r;
  const auto q = detail::s_quadrature(opt);
  std::vector<Complex> plus(xs.size()), minus(xs.size());
  std::vector<double> tails(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) {
    const double x = xs[i];
    auto [p, tp] = detail::mellin([&](double s) { return f.phi_hat0(x, s); }, m, q);
    auto [n, tn] = detail::mellin([&](double s) { return f.phi_hat0(x, -s); }, m, q);
    plus[i] = p;
    minus[i] = n;
    tails[i] = std::max(tp, tn);
  });
  for (std::size_t i = 0; i < xs.size(); ++i)
    require(tails[i] <= opt.tail_tolerance, ErrorKind::tail,
            "fhat_0 has mass at the ends of the s-range: ratio " + std::to_string(tails[i]));
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t k = 0; k < xis.size(); ++k) {
      const double a = std::abs(xis[k]);
      r.values(static_cast<long>(i), static_cast<long>(k)) = std::pow(a, -m) * (xis[k] > 0 ? plus[i] : minus[i]);
    }
  return r;
}

inline SymbolTable principal_symbol(const KernelFamily& f, int m, const GridSpec& g, const SymbolOptions& opt = {}) {
  const double floor = opt.floor.value_or(g.frequency_floor());
  std::vector<double> xis;
  for (std::size_t k = 0; k < g.n; ++k)
    if (k != g.nyquist_bin() && std::abs(g.xi(k)) >= floor) xis.push_back(g.xi(k));
  return principal_symbol(f, m, g.xs(), xis, floor, opt);
}

struct SymbolFamilyOptions {
  double t_cut0 = 1.0;
  double t_cut1 = 2.0;
  std::vector<double> zero_probe = uniform_grid(-8.0, 8.0, 33);
};

// fhat(x, zeta, t) = sigma0(x, sign zeta) psi(|zeta|) chi(t), chi = 1 for
// t <= t_cut0 and 0 for t >= t_cut1.
inline KernelFamily symbol_to_family(const CosphereFn& sigma0, const BumpProfile& psi, const GroupoidSpec& g = {},
                                     const QuadratureSpec& q = default_quadrature(),
                                     const SymbolFamilyOptions& opt = {}) {
  psi.validate();
  bool zero = true;
  for (double x : opt.zero_probe)
    if (sigma0(x, 1) != Complex(0.0) || sigma0(x, -1) != Complex(0.0)) zero = false;
  if (zero) return KernelFamily::zero(g, q.t_min, q.t_max);
  AnalyticGenerator gen;
  gen.name = "symbol-family";
  gen.phi_hat = [sigma0, psi, opt](double x, double z, double t) -> Complex {
    const double pv = psi(std::abs(z));
    if (pv == 0.0) return 0.0;
    const double c = cutoff(t, opt.t_cut0, opt.t_cut1);
    if (c == 0.0) return 0.0;
    return sigma0(x, z > 0 ? 1 : -1) * pv * c;
  };
  gen.zeta_radius = psi.support_hi();
  return KernelFamily(g, std::move(gen), q.t_min, q.t_max, g.half_width, 64.0, ClassTag::J);
}

struct AsymptoticTerm {
  int k = 0;
  int degree = 0;  // -(k + m)
  SymbolTable values;
  double homogeneity_error = 0.0;  // max |a(x,2xi)/a(x,xi) 2^{k+m} - 1|
};

struct AsymptoticOptions {
  double u0 = 0.0625;  // largest u sample; samples u0 2^{-i}
  int extra_samples = 2;
  double fit_tolerance = 1e-6;
  double homogeneity_tolerance = 1e-2;
  SymbolOptions quad;
};

namespace detail {

// Coefficients b_0..b_K of phi_hat(x, zeta, u) ~ sum b_k u^k by least squares
// on dyadic u; returns coefficients and the relative residual.
struct TaylorFit {
  std::vector<Complex> b;
  double residual = 0.0;
};

class TaylorFitter {
 public:
  TaylorFitter(int K, const AsymptoticOptions& opt) : k_(K), opt_(opt) {
    const int n = K + 1 + opt.extra_samples;
    a_.resize(n, K + 1);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k <= K; ++k) a_(i, k) = std::pow(std::ldexp(1.0, -i), k);
    pinv_ = a_.completeOrthogonalDecomposition().pseudoInverse();
  }

  TaylorFit operator()(const std::function<Complex(double)>& fn) const {
    const long n = a_.rows();
    Eigen::VectorXcd y(n);
    for (long i = 0; i < n; ++i) y(i) = fn(opt_.u0 * std::ldexp(1.0, -static_cast<int>(i)));
    const Eigen::VectorXcd c = pinv_.cast<Complex>() * y;
    TaylorFit t;
    t.b.resize(static_cast<std::size_t>(k_ + 1));
    for (int k = 0; k <= k_; ++k) t.b[static_cast<std::size_t>(k)] = c(k) / std::pow(opt_.u0, k);
    const double scale = y.cwiseAbs().maxCoeff();
    t.residual = scale > 0.0 ? (a_.cast<Complex>() * c - y).cwiseAbs().maxCoeff() / scale : 0.0;
    return t;
  }

 private:
  int k_;
  AsymptoticOptions opt_;
  Eigen::MatrixXd a_;
  Eigen::MatrixXd pinv_;
};

}  // namespace detail

// a_{k+m}(x, xi) = int_0^inf b_k(x, t xi) t^{k+m} dt/t for k = 0..K.
inline std::vector<AsymptoticTerm> asymptotic_symbol(const KernelFamily& f, int m, int K, const std::vector<double>& xs,
                                                     const std::vector<double>& xis, double floor,
                                                     const AsymptoticOptions& opt = {}) {
  require(m >= 0 && K >= 0, ErrorKind::domain, "m and K must be nonnegative");
  if (opt.quad.require_j) require(tagged_j(f), ErrorKind::class_mismatch, "asymptotic_symbol needs a family tagged J");
  for (double xi : xis) require(std::abs(xi) >= floor, ErrorKind::floor, "|xi| below the frequency floor");
  std::vector<AsymptoticTerm> out(static_cast<std::size_t>(K + 1));
  for (int k = 0; k <= K; ++k) {
    auto& t = out[static_cast<std::size_t>(k)];
    t.k = k;
    t.degree = -(k + m);
    t.values = {xs, xis, Matrix::Zero(static_cast<long>(xs.size()), static_cast<long>(xis.size()))};
  }
  if (f.known_zero()) return out;
  const auto q = detail::s_quadrature(opt.quad);
  const auto ts = q.nodes();
  const auto ws = q.weights();
  const detail::TaylorFitter taylor_fit(K, opt);
  // per (x, sign): b_k on the s-grid, then Mellin sums with s^{k+m}
  double worst = 0.0;
  double worst_zeta = 0.0, worst_x = 0.0;
  std::vector<std::vector<Complex>> mel(xs.size() * 2, std::vector<Complex>(static_cast<std::size_t>(K + 1)));
  std::vector<double> res(xs.size() * 2, 0.0), rz(xs.size() * 2, 0.0);
  parallel_for(xs.size() * 2, [&](std::size_t idx) {
    const double x = xs[idx / 2];
    const double sign = idx % 2 == 0 ? 1.0 : -1.0;
    std::vector<Complex> acc(static_cast<std::size_t>(K + 1), 0.0);
    double peak = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double z = sign * ts[i];
      const auto fit = taylor_fit([&](double u) { return f.phi_hat(x, z, u); });
      double mag = 0.0;
      for (const auto& b : fit.b) mag = std::max(mag, std::abs(b));
      peak = std::max(peak, mag);
      if (fit.residual > res[idx]) {
        res[idx] = fit.residual;
        rz[idx] = z;
      }
      for (int k = 0; k <= K; ++k)
        acc[static_cast<std::size_t>(k)] += ws[i] * std::pow(ts[i], k + m) * fit.b[static_cast<std::size_t>(k)];
    }
    mel[idx] = acc;
  });
  for (std::size_t idx = 0; idx < res.size(); ++idx)
    if (res[idx] > worst) {
      worst = res[idx];
      worst_zeta = rz[idx];
      worst_x = xs[idx / 2];
    }
  require(worst <= opt.fit_tolerance, ErrorKind::unstable_fit,
          "u-Taylor fit residual " + std::to_string(worst) + " at x = " + std::to_string(worst_x) +
              ", zeta = " + std::to_string(worst_zeta));
  for (int k = 0; k <= K; ++k) {
    auto& t = out[static_cast<std::size_t>(k)];
    const int p = k + m;
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t c = 0; c < xis.size(); ++c) {
        const double a = std::abs(xis[c]);
        const auto& row = mel[2 * i + (xis[c] > 0 ? 0 : 1)];
        t.values.values(static_cast<long>(i), static_cast<long>(c)) = std::pow(a, -p) * row[static_cast<std::size_t>(k)];
      }
    // homogeneity: evaluate at 2 xi by direct t-quadrature
    double herr = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t c = 0; c < xis.size(); ++c) {
        const Complex a1 = t.values.values(static_cast<long>(i), static_cast<long>(c));
        if (std::abs(a1) < 1e-12) continue;
        Complex a2 = 0.0;
        const double xi2 = 2.0 * xis[c];
        for (std::size_t q2 = 0; q2 < ts.size(); ++q2) {
          const double tt = ts[q2] / std::abs(xi2);
          const auto fit = taylor_fit([&](double u) { return f.phi_hat(xs[i], tt * xi2, u); });
          a2 += ws[q2] * std::pow(tt, p) * fit.b[static_cast<std::size_t>(k)];
        }
        herr = std::max(herr, std::abs(a2 / a1 * std::ldexp(1.0, p) - 1.0));
      }
    t.homogeneity_error = herr;
    require(herr <= opt.homogeneity_tolerance, ErrorKind::unstable_fit,
            "term " + std::to_string(k) + " fails the homogeneity check: " + std::to_string(herr));
  }
  return out;
}

struct FiberRelation {
  double t0 = 0.0;
  std::vector<double> zeta;
  double max_deviation = 0.0;
  double reference_sup = 0.0;
};

struct ModuleActionOptions {
  double t0 = 1.0 / 32.0;
  double zeta_lo = 1.0;
  double zeta_hi = 2.5;
  int levels = 3;  // Richardson levels
  bool check_fiber = true;
};

struct ModuleActionResult {
  GridFamily h;
  std::optional<FiberRelation> relation;
};

// |hhat_0 - fhat_0 sigma_0(P)| on the extrapolated t = 0 fiber. fhat0 may be
// supplied analytically; otherwise it is extracted from f like hhat_0.
inline FiberRelation fiber_relation(const GridFamily& f, const GridFamily& h, const CosphereFn& sigma0,
                                    const ModuleActionOptions& opt,
                                    const std::function<Complex(double, double)>& fhat0 = {}) {
  const auto hf = fiber_at_zero(h, opt.t0, opt.zeta_lo, opt.zeta_hi, opt.levels);
  GridFiber ff;
  if (!fhat0) ff = fiber_at_zero(f, opt.t0, opt.zeta_lo, opt.zeta_hi, opt.levels);
  const auto& g = f.grid();
  FiberRelation r;
  r.t0 = opt.t0;
  r.zeta = hf.zeta;
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t c = 0; c < hf.zeta.size(); ++c) {
      const double z = hf.zeta[c];
      const Complex fv = fhat0 ? fhat0(g.x(j), z) : ff.values(static_cast<long>(j), static_cast<long>(c));
      const Complex want = fv * sigma0(g.x(j), z > 0 ? 1 : -1);
      r.reference_sup = std::max(r.reference_sup, std::abs(want));
      r.max_deviation =
          std::max(r.max_deviation, std::abs(hf.values(static_cast<long>(j), static_cast<long>(c)) - want));
    }
  return r;
}

// h_t = f_t * P at every node; P of order <= 0.
inline ModuleActionResult module_action(const GridFamily& f, const QuantizedOperator& p,
                                        const ModuleActionOptions& opt = {}) {
  require(tagged_j(f), ErrorKind::class_mismatch, "module_action needs a family tagged J");
  require(p.order <= 0, ErrorKind::symbol_order, "module_action needs an operator of order <= 0");
  require(f.grid() == p.op.grid(), ErrorKind::grid_mismatch, "operator lives on a different grid");
  const DiscreteOperator op = p.op;
  ModuleActionResult r;
  r.h = f.map([op](const DiscreteOperator& a) { return a.is_zero() ? a : a.compose(op); }, f.tag(),
              f.name() + ".P");
  if (opt.check_fiber && p.symbol) {
    const ClassicalSymbol sym = *p.symbol;
    r.relation = fiber_relation(f, r.h, [sym](double x, int s) { return sym.principal_value(x, s); }, opt);
  }
  return r;
}

}  // namespace adcalc
