#pragma once

#include <Eigen/Eigenvalues>

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "adcalc/algebra.hpp"
#include "adcalc/quantization.hpp"

namespace adcalc {

// A J family realized at the t-nodes, with its quadrature covering the mass.
using ModuleElement = GridFamily;

struct ModuleOptions {
  double tail_tolerance = 1e-8;
};

inline ModuleElement module_element(const KernelFamily& f, const GridSpec& g, const QuadratureSpec& q,
                                    const ModuleOptions& opt = {}) {
  require(tagged_j(f), ErrorKind::class_mismatch, "module elements must be tagged J");
  auto e = realize(f, g, q).materialize();
  const auto sup = node_sup(e);
  double peak = 0.0;
  for (double s : sup) peak = std::max(peak, s);
  const double tail = sup.front() + sup.back();
  require(peak == 0.0 || tail <= opt.tail_tolerance * peak, ErrorKind::tail,
          "family has mass at the ends of the t-quadrature: " + std::to_string(tail / peak));
  return e.with_tag(f.known_zero() ? ClassTag::J0 : ClassTag::J);
}

// <f|g> = sum_i w_i f_{t_i}^* g_{t_i}; declared order 0.
inline DiscreteOperator inner_product(const ModuleElement& f, const ModuleElement& g) {
  f.check_compatible(g);
  const auto w = f.quad().weights();
  const auto& grid = f.grid();
  Matrix acc = Matrix::Zero(grid.n, grid.n);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto a = f.node(i);
    if (a.is_zero()) continue;
    const auto b = g.node(i);
    if (b.is_zero()) continue;
    acc.noalias() += (w[i] * grid.dx()) * (a.kernel().adjoint() * b.kernel());
  }
  return {grid, std::move(acc)};
}

inline QuantizedOperator inner_product_operator(const ModuleElement& f, const ModuleElement& g) {
  return {inner_product(f, g), 0, std::nullopt};
}

struct GaugeOptions {
  double mass_tolerance = 1e-8;
};

// (U_s f)_t = f_{st}. Node-aligned s shift node indices; other s need a
// continuous evaluator. Mass pushed off the node range is a range error.
inline ModuleElement gauge(double s, const ModuleElement& f, const GaugeOptions& opt = {}) {
  require(s > 0.0, ErrorKind::domain, "gauge needs s > 0");
  const auto shift = f.quad().node_shift(s);
  if (!shift) {
    require(f.continuous(), ErrorKind::range, "s is not node aligned and the family has no continuous evaluator");
    const ModuleElement src = f;
    const auto ts = f.ts();
    return {f.grid(), f.quad(), [src, ts, s](std::size_t i) { return src.at(ts[i] * s); }, f.tag(),
            [src, s](double t) { return src.at(t * s); }, f.name() + ".U"};
  }
  const long j = *shift;
  if (j == 0) return f;
  if (!f.continuous()) {
    // nodes of f that no node of U_s f reads
    const long n = static_cast<long>(f.size());
    double lost = 0.0, peak = 0.0;
    for (long k = 0; k < n; ++k) {
      const double v = f.ts()[static_cast<std::size_t>(k)] * f.node(static_cast<std::size_t>(k)).kernel().cwiseAbs().maxCoeff();
      peak = std::max(peak, v);
      if (k - j < 0 || k - j >= n) lost = std::max(lost, v);
    }
    require(peak == 0.0 || lost <= opt.mass_tolerance * peak, ErrorKind::range,
            "gauge pushes family mass outside the t-range");
  }
  const ModuleElement src = f;
  GridFamily::TimeFn tf;
  if (f.continuous()) tf = [src, s](double t) { return src.at(t * s); };
  return {f.grid(), f.quad(), [src, j](std::size_t i) { return src.node_shifted(i, j); }, f.tag(), tf,
          f.name() + ".U"};
}

// f <g|h> as a module element.
inline ModuleElement rank_one(const ModuleElement& f, const ModuleElement& g, const ModuleElement& h) {
  ModuleActionOptions opt;
  opt.check_fiber = false;
  return module_action(f, inner_product_operator(g, h), opt).h.materialize();
}

struct CrossedOptions {
  int k_lo = -6;
  int k_hi = 6;
  double floor = 1e-13;  // relative to the peak sup-norm
  double min_slope = 6.0;
  std::size_t tail_points = 3;
};

struct EndDecay {
  DecayFit fit;
  double tail_slope = 0.0;  // over the last usable samples
};

struct CrossedElement {
  std::vector<double> s;
  std::vector<ModuleElement> samples;  // s -> f * alpha_s(g^*)
  std::vector<double> sup;             // sup |phi| over nodes per sample
  EndDecay small_s;                    // s -> 0
  EndDecay large_s;                    // s -> infinity
  bool valid = false;
};

namespace detail {

inline EndDecay end_decay(const std::vector<double>& r, const std::vector<double>& v, double floor,
                          std::size_t tail_points) {
  EndDecay e;
  e.fit = decay_exponent(r, v, floor);
  e.tail_slope = tail_slope(r, v, floor, tail_points);
  return e;
}

inline double family_sup(const GridFamily& f) {
  double s = 0.0;
  for (double v : node_sup(f)) s = std::max(s, v);
  return s;
}

}  // namespace detail

// Samples s = 2^k of f * alpha_s(g^*), (alpha_s g^*)_t = g^*_{st}, with
// dyadic slope fits at both ends.
inline CrossedElement crossed_element(const ModuleElement& f, const ModuleElement& g, const CrossedOptions& opt = {}) {
  f.check_compatible(g);
  require(opt.k_lo < 0 && opt.k_hi > 0, ErrorKind::range, "crossed element needs k_lo < 0 < k_hi");
  require(f.quad().node_shift(2.0).has_value(), ErrorKind::grid_mismatch, "s = 2 must be node aligned");
  for (const auto* e : {&f, &g})
    if (auto sup = e->grid().half_width; e->node(0).support() && *e->node(0).support() > 0.5 * sup)
      fail(ErrorKind::support, "kernel support exceeds half the domain");
  const auto fm = f.materialize();
  const auto gs = adjoint(g).materialize();
  CrossedElement c;
  for (int k = opt.k_lo; k <= opt.k_hi; ++k) {
    const double s = std::ldexp(1.0, k);
    GaugeOptions go;
    go.mass_tolerance = std::numeric_limits<double>::infinity();
    auto sample = convolve(fm, gauge(s, gs, go)).materialize();
    c.s.push_back(s);
    c.sup.push_back(detail::family_sup(sample));
    c.samples.push_back(std::move(sample));
  }
  double peak = 0.0;
  for (double v : c.sup) peak = std::max(peak, v);
  const double fl = opt.floor * std::max(peak, 1e-300);
  std::vector<double> rs, vs, rl, vl;
  for (std::size_t i = 0; i < c.s.size(); ++i) {
    if (c.s[i] <= 1.0) {
      rs.push_back(c.s[i]);
      vs.push_back(c.sup[i]);
    }
    if (c.s[i] >= 1.0) {
      rl.push_back(1.0 / c.s[i]);
      vl.push_back(c.sup[i]);
    }
  }
  c.small_s = detail::end_decay(rs, vs, fl, opt.tail_points);
  c.large_s = detail::end_decay(rl, vl, fl, opt.tail_points);
  c.valid = peak == 0.0 || (c.small_s.tail_slope >= opt.min_slope && c.large_s.tail_slope >= opt.min_slope);
  return c;
}

struct ConsistencyReport {
  double max_relative_error = 0.0;
  std::size_t probes = 0;
};

// Discretized pi(int f alpha_s(g^*) lambda_s ds/s) h against f <g|h>. The
// s-grid carries the t-grid log step so that every gauge is an index shift;
// the check runs on random probe vectors at every `node_stride`-th node.
// The error is max ||lhs - rhs|| over probed nodes relative to max ||rhs||.
inline ConsistencyReport crossed_consistency(const ModuleElement& f, const ModuleElement& g, const ModuleElement& h,
                                             std::size_t n_probes = 3, std::size_t node_stride = 4,
                                             std::uint64_t seed = 7) {
  f.check_compatible(g);
  f.check_compatible(h);
  const auto fm = f.materialize();
  const auto gm = g.materialize();
  const auto hm = h.materialize();
  const auto& grid = f.grid();
  const long n = static_cast<long>(f.size());
  const double step = f.quad().log_step();
  std::vector<bool> gz(static_cast<std::size_t>(n)), hz(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    gz[static_cast<std::size_t>(i)] = gm.node(static_cast<std::size_t>(i)).is_zero();
    hz[static_cast<std::size_t>(i)] = hm.node(static_cast<std::size_t>(i)).is_zero();
  }
  const auto rank = rank_one(fm, gm, hm);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  ConsistencyReport rep;
  double diff = 0.0, scale = 0.0;
  for (std::size_t p = 0; p < n_probes; ++p) {
    Vector v(static_cast<long>(grid.n));
    for (long j = 0; j < v.size(); ++j) v(j) = Complex(nd(rng), nd(rng));
    for (long i = 0; i < n; i += static_cast<long>(node_stride)) {
      const auto fi = fm.node(static_cast<std::size_t>(i));
      if (fi.is_zero()) continue;
      // sum over shifts j: s_j = e^{j step}, (alpha_s g^*)_{t_i} = g^*_{i+j}, (U_s h)_{t_i} = h_{i+j}
      Vector acc = Vector::Zero(static_cast<long>(grid.n));
      for (long j = -i; j < n - i; ++j) {
        const auto k = static_cast<std::size_t>(i + j);
        if (gz[k] || hz[k]) continue;
        const Vector hv = hm.node(k).apply(v);
        acc += step * gm.node(k).adjoint().apply(hv);
      }
      const Vector lhs = fi.apply(acc);
      const Vector rhs = rank.node(static_cast<std::size_t>(i)).apply(v);
      diff = std::max(diff, (lhs - rhs).norm());
      scale = std::max(scale, rhs.norm());
      ++rep.probes;
    }
  }
  rep.max_relative_error = scale > 0.0 ? diff / scale : diff;
  return rep;
}

// ----------------------------------------------------------------------------

struct WitnessOptions {
  double t_cut0 = 0.5;
  double t_cut1 = 1.0;
  double band_lo = 4.0;  // resolved band |xi| in [band_lo, nyquist)
  double delta = 0.1;
  double band_delta = 0.5;
  double certificate_slope = 6.0;
  double certificate_floor = 1e-10;
  std::size_t tail_points = 3;
  QuadratureSpec quad = octave_quadrature(-12, 4, 64);
};

struct WitnessReport {
  ModuleElement f;
  DiscreteOperator gram;
  double min_eig = 0.0;
  double min_eig_band = 0.0;
  double distance_to_identity = 0.0;
  EndDecay certificate;
  bool corrected = false;
  bool invertible = false;
  bool smoothing = false;
};

namespace detail {

// Unitary DFT columns e^{i x_j xi_k} / sqrt(N) for the chosen bins.
inline Matrix fourier_columns(const GridSpec& g, const std::vector<std::size_t>& bins) {
  Matrix b(g.n, static_cast<long>(bins.size()));
  const double norm = 1.0 / std::sqrt(static_cast<double>(g.n));
  for (std::size_t c = 0; c < bins.size(); ++c)
    for (std::size_t j = 0; j < g.n; ++j)
      b(static_cast<long>(j), static_cast<long>(c)) = std::polar(norm, g.x(j) * g.xi(bins[c]));
  return b;
}

inline double min_eigenvalue(const Matrix& m) {
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Largest Fourier-basis coefficient of a matrix per |xi| on dyadic bins,
// fitted for decay as |xi| grows.
inline EndDecay fourier_decay(const GridSpec& g, const Matrix& m, double floor_rel, std::size_t tail_points) {
  std::vector<std::size_t> all(g.n);
  for (std::size_t k = 0; k < g.n; ++k) all[k] = k;
  const Matrix f = fourier_columns(g, all);
  const Matrix c = f.adjoint() * m * f;
  std::vector<double> r, v;
  double peak = c.cwiseAbs().maxCoeff();
  for (std::size_t k = 1; k < g.n / 2; k *= 2) {
    double s = 0.0;
    for (std::size_t kk = 0; kk < g.n; ++kk) {
      if (static_cast<std::size_t>(std::labs(g.signed_index(kk))) != k) continue;
      s = std::max(s, c.row(static_cast<long>(kk)).cwiseAbs().maxCoeff());
      s = std::max(s, c.col(static_cast<long>(kk)).cwiseAbs().maxCoeff());
    }
    r.push_back(1.0 / (static_cast<double>(k) * g.dxi()));
    v.push_back(s);
  }
  return end_decay(r, v, floor_rel * std::max(peak, 1e-300), tail_points);
}

}  // namespace detail

// f_t = psi(t|D|) chi(t) with chi = 1 below t_cut0 and 0 above t_cut1, plus
// eta(t) h with eta = psi(t/2) on (2, 4) when a correction h is given.
inline WitnessReport full_witness(const BumpProfile& psi, const GridSpec& grid,
                                  const std::optional<DiscreteOperator>& correction = std::nullopt,
                                  const WitnessOptions& opt = {}) {
  require(psi.kind == ProfileKind::psi_window && psi.normalization == PsiNormalization::square, ErrorKind::profile,
          "the witness needs a square-normalised psi window");
  psi.validate();
  if (correction) require(correction->grid() == grid, ErrorKind::grid_mismatch, "correction on a different grid");
  const auto q = opt.quad;
  const auto ts = q.nodes();
  const BumpProfile p = psi;
  const double c0 = opt.t_cut0, c1 = opt.t_cut1;
  std::optional<DiscreteOperator> h = correction;
  auto node = [grid, p, c0, c1, h](double t) {
    DiscreteOperator a = DiscreteOperator::zero(grid);
    const double c = cutoff(t, c0, c1);
    if (c != 0.0)
      a = DiscreteOperator::from_symbol(grid, [&](std::size_t, double xi) { return Complex(p(t * std::abs(xi)) * c); });
    if (h) {
      const double e = p(0.5 * t);
      if (e != 0.0) a = a + (*h) * Complex(e);
    }
    return a;
  };
  WitnessReport r;
  r.corrected = correction.has_value();
  r.f = GridFamily(grid, q, [node, ts](std::size_t i) { return node(ts[i]); }, ClassTag::J, node, "witness")
            .materialize();
  r.gram = inner_product(r.f, r.f);
  const Matrix m = r.gram.matrix();
  r.min_eig = detail::min_eigenvalue(m);
  std::vector<std::size_t> band;
  for (std::size_t k = 0; k < grid.n; ++k)
    if (k != grid.nyquist_bin() && std::abs(grid.xi(k)) >= opt.band_lo) band.push_back(k);
  require(!band.empty(), ErrorKind::range, "resolved band is empty");
  const Matrix b = detail::fourier_columns(grid, band);
  r.min_eig_band = detail::min_eigenvalue(b.adjoint() * m * b);
  const Matrix id = Matrix::Identity(grid.n, grid.n);
  r.distance_to_identity = DiscreteOperator(grid, (m - id) / grid.dx()).norm();
  r.certificate = detail::fourier_decay(grid, id - m, opt.certificate_floor, opt.tail_points);
  r.invertible = r.corrected ? r.min_eig >= opt.delta : r.min_eig_band >= opt.band_delta;
  r.smoothing = r.certificate.tail_slope >= opt.certificate_slope;
  return r;
}

struct CornerResult {
  DiscreteOperator q_part;
  DiscreteOperator r_part;
  std::vector<double> omega;
  std::vector<double> response;  // |R g_omega| / |g_omega|
  EndDecay certificate;
};

// Q = <f|f> P <f|f>, R = P - Q, with R probed by Gaussian packets at
// quarter-octave frequencies up to 3/4 of Nyquist.
inline CornerResult corner_decompose(const DiscreteOperator& p, const WitnessReport& w, double packet_width = 1.0,
                                     double floor = 1e-10, std::size_t tail_points = 3) {
  require(w.invertible, ErrorKind::certificate, "corner decomposition needs an invertibility certificate");
  require(p.grid() == w.gram.grid(), ErrorKind::grid_mismatch, "operator on a different grid");
  const auto& g = p.grid();
  CornerResult c;
  c.q_part = w.gram.compose(p).compose(w.gram);
  c.r_part = p - c.q_part;
  double peak = 0.0;
  for (double om = g.dxi(); om <= 0.75 * g.nyquist(); om *= std::pow(2.0, 0.25)) {
    const Vector v = sample_function(g, [&](double x) {
      return std::exp(-0.5 * x * x / (packet_width * packet_width)) * std::polar(1.0, om * x);
    });
    c.omega.push_back(om);
    c.response.push_back(l2_norm(g, c.r_part.apply(v)) / l2_norm(g, v));
    peak = std::max(peak, c.response.back());
  }
  std::vector<double> r(c.omega.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = 1.0 / c.omega[i];
  c.certificate = detail::end_decay(r, c.response, floor * std::max(peak, 1e-300), tail_points);
  return c;
}

}  // namespace adcalc
