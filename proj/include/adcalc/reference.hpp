#pragma once

// Reference values computed without the quantization or FFT paths: a fixed
// Gauss-Kronrod rule in y = ln t for the symbol integral and a naive DFT
// Kohn-Nirenberg apply.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <vector>

#include "adcalc/core.hpp"
#include "adcalc/family.hpp"
#include "adcalc/grid.hpp"
#include "adcalc/operator.hpp"

namespace adcalc::reference {

// int_a^b F(y) dy by the 15-point Kronrod rule on panels of width about h.
inline Complex composite_gk(const std::function<Complex(double)>& f, double a, double b, double h) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  static const auto& xs = GK::abscissa();
  static const auto& ws = GK::weights();
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
  const double w = (b - a) / panels;
  Complex s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * w, half = 0.5 * w;
    Complex ps = ws[0] * f(mid);
    for (std::size_t i = 1; i < xs.size(); ++i) ps += ws[i] * (f(mid - half * xs[i]) + f(mid + half * xs[i]));
    s += half * ps;
  }
  return s;
}

// a(x, xi) = int_0^inf t^m phi_hat(x, t xi, t) dt/t over t in [2^-24 / max(|xi|, 1), 256].
inline Complex quantization_symbol(const KernelFamily& f, int m, double x, double xi,
                                   double panel = std::log(2.0) / 2.0) {
  const double a = std::max(std::abs(xi), 1.0);
  return composite_gk(
      [&](double y) {
        const double t = std::exp(y);
        return std::pow(t, m) * f.phi_hat(x, t * xi, t);
      },
      std::log(std::ldexp(1.0, -24) / a), std::log(256.0), panel);
}

// (2 pi)^{-1} sum_k e^{i x xi_k} a(x, xi_k) ghat_k by a naive DFT over active bins.
inline Vector kn_apply_table(const GridSpec& g, const std::function<Complex(std::size_t, std::size_t)>& a,
                             const Vector& v, const std::vector<bool>& active) {
  const std::size_t n = g.n;
  std::vector<Complex> vh(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (!active[k]) continue;
    for (std::size_t l = 0; l < n; ++l) vh[k] += v(static_cast<long>(l)) * std::polar(1.0, -g.x(l) * g.xi(k));
  }
  Vector out = Vector::Zero(static_cast<long>(n));
  for (std::size_t j = 0; j < n; ++j) {
    Complex s = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      if (active[k]) s += std::polar(1.0, g.x(j) * g.xi(k)) * a(j, k) * vh[k];
    out(static_cast<long>(j)) = s / static_cast<double>(n);
  }
  return out;
}

inline Vector kn_apply(const GridSpec& g, const std::function<Complex(double, double)>& a, const Vector& v,
                       const std::vector<bool>& active) {
  return kn_apply_table(g, [&](std::size_t j, std::size_t k) { return a(g.x(j), g.xi(k)); }, v, active);
}

// Gaussian packet e^{-(x-x0)^2 / (2 w^2)} e^{i omega x}.
inline Vector packet(const GridSpec& g, double omega, double w, double x0 = 0.0) {
  return sample_function(g, [&](double x) {
    const double d = x - x0;
    return std::exp(-0.5 * d * d / (w * w)) * std::polar(1.0, omega * x);
  });
}

// Bins where the discrete spectrum exceeds rel times its peak.
inline std::vector<bool> spectral_support(const GridSpec& g, const Vector& v, double rel) {
  std::vector<double> mag(g.n, 0.0);
  double peak = 0.0;
  for (std::size_t k = 0; k < g.n; ++k) {
    Complex s = 0.0;
    for (std::size_t l = 0; l < g.n; ++l) s += v(static_cast<long>(l)) * std::polar(1.0, -g.x(l) * g.xi(k));
    mag[k] = std::abs(s);
    peak = std::max(peak, mag[k]);
  }
  std::vector<bool> on(g.n);
  for (std::size_t k = 0; k < g.n; ++k) on[k] = mag[k] > rel * peak;
  return on;
}

// count packets with centre frequencies spread over [Nyq/8, Nyq/2] on both
// half lines, width 1, centres spread over [-L/4, L/4].
inline std::vector<Vector> band_limited_probes(const GridSpec& g, std::size_t count) {
  std::vector<Vector> v;
  const double lo = g.nyquist() / 8.0, hi = g.nyquist() / 2.0 - 4.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double s = count > 1 ? static_cast<double>(i) / static_cast<double>(count - 1) : 0.5;
    const double om = (lo + (hi - lo) * s) * (i % 2 == 0 ? 1.0 : -1.0);
    const double x0 = g.half_width * 0.5 * (2.0 * s - 1.0);
    v.push_back(packet(g, om, 1.0, x0));
  }
  return v;
}

struct QuantizeComparison {
  std::vector<double> errors;  // per probe, relative L2
  double max_error = 0.0;
};

// |P v - KN(a) v| / |v| with a from quantization_symbol, restricted to bins
// above rel of each probe's spectral peak.
inline QuantizeComparison compare_quantization(const KernelFamily& f, int m, const DiscreteOperator& p,
                                               const std::vector<Vector>& probes, double rel = 1e-14) {
  const auto& g = p.grid();
  std::vector<std::vector<bool>> act;
  std::vector<bool> any(g.n, false);
  for (const auto& v : probes) {
    act.push_back(spectral_support(g, v, rel));
    for (std::size_t k = 0; k < g.n; ++k) any[k] = any[k] || act.back()[k];
  }
  Matrix table = Matrix::Zero(static_cast<long>(g.n), static_cast<long>(g.n));
  parallel_for(g.n, [&](std::size_t j) {
    for (std::size_t k = 0; k < g.n; ++k)
      if (any[k]) table(static_cast<long>(j), static_cast<long>(k)) = quantization_symbol(f, m, g.x(j), g.xi(k));
  });
  QuantizeComparison c;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const Vector want = kn_apply_table(
        g, [&](std::size_t j, std::size_t k) { return table(static_cast<long>(j), static_cast<long>(k)); }, probes[i],
        act[i]);
    const Vector got = p.apply(probes[i]);
    c.errors.push_back((got - want).norm() / probes[i].norm());
    c.max_error = std::max(c.max_error, c.errors.back());
  }
  return c;
}

}  // namespace adcalc::reference
