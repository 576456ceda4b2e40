#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "adcalc/core.hpp"
#include "adcalc/geometry.hpp"

namespace adcalc {

// Periodic spatial grid x_j = -L + j dx on [-L, L), with the matching FFT
// frequency grid xi_k = 2 pi k / (2L) in FFT ordering.
struct GridSpec {
  double half_width = 8.0;
  std::size_t n = 128;

  GridSpec() = default;
  GridSpec(double l, std::size_t points) : half_width(l), n(points) { validate(); }

  void validate() const {
    require(half_width > 0.0 && std::isfinite(half_width), ErrorKind::domain, "grid half_width must be positive");
    require(is_pow2(n), ErrorKind::domain, "grid size must be a power of two");
  }

  double dx() const { return 2.0 * half_width / static_cast<double>(n); }
  double x(std::size_t j) const { return -half_width + static_cast<double>(j) * dx(); }
  double dxi() const { return kPi / half_width; }
  long signed_index(std::size_t k) const {
    const long kk = static_cast<long>(k), nn = static_cast<long>(n);
    return kk < nn / 2 ? kk : kk - nn;
  }
  double xi(std::size_t k) const { return static_cast<double>(signed_index(k)) * dxi(); }
  double nyquist() const { return kPi / dx(); }
  std::size_t nyquist_bin() const { return n / 2; }
  // Two Fourier bins.
  double frequency_floor() const { return 2.0 * dxi(); }

  // Representative of x - y in [-L, L).
  double minimal_image(double d) const {
    const double p = 2.0 * half_width;
    double r = std::fmod(d + half_width, p);
    if (r < 0) r += p;
    return r - half_width;
  }

  std::vector<double> xs() const {
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = x(j);
    return v;
  }

  bool operator==(const GridSpec& o) const { return half_width == o.half_width && n == o.n; }
};

enum class QuadratureRule { log_trapezoidal, log_gauss_legendre };

inline std::string to_string(QuadratureRule r) {
  return r == QuadratureRule::log_trapezoidal ? "log-trapezoidal" : "log-Gauss-Legendre";
}

// Discretisation of int_{t_min}^{t_max} F(t) dt/t.
struct QuadratureSpec {
  double t_min = std::ldexp(1.0, -12);
  double t_max = 16.0;
  std::size_t n_nodes = 129;
  QuadratureRule rule = QuadratureRule::log_trapezoidal;

  void validate() const {
    require(t_min > 0.0 && std::isfinite(t_min), ErrorKind::domain, "t_min must be positive");
    require(t_max > t_min && std::isfinite(t_max), ErrorKind::domain, "t_max must exceed t_min");
    require(n_nodes >= 2, ErrorKind::domain, "at least two quadrature nodes");
  }

  double log_span() const { return std::log(t_max / t_min); }
  double log_step() const { return log_span() / static_cast<double>(n_nodes - 1); }

  std::vector<double> nodes() const {
    validate();
    std::vector<double> t(n_nodes);
    if (rule == QuadratureRule::log_trapezoidal) {
      const double a = std::log(t_min), h = log_step();
      for (std::size_t i = 0; i < n_nodes; ++i) t[i] = std::exp(a + h * static_cast<double>(i));
      t.front() = t_min;
      t.back() = t_max;
    } else {
      const auto [s, w] = gauss_legendre_unit(n_nodes);
      const double a = std::log(t_min), b = std::log(t_max);
      for (std::size_t i = 0; i < n_nodes; ++i) t[i] = std::exp(0.5 * (a + b) + 0.5 * (b - a) * s[i]);
    }
    return t;
  }

  std::vector<double> weights() const {
    validate();
    std::vector<double> w(n_nodes);
    if (rule == QuadratureRule::log_trapezoidal) {
      const double h = log_step();
      for (auto& v : w) v = h;
      w.front() = w.back() = 0.5 * h;
    } else {
      const auto [s, ws] = gauss_legendre_unit(n_nodes);
      const double half = 0.5 * log_span();
      for (std::size_t i = 0; i < n_nodes; ++i) w[i] = half * ws[i];
    }
    return w;
  }

  // Nodes per octave when log-trapezoidal nodes sit on t_min 2^{j/k}.
  std::optional<int> nodes_per_octave() const {
    if (rule != QuadratureRule::log_trapezoidal) return std::nullopt;
    const double k = std::log(2.0) / log_step();
    const double r = std::round(k);
    if (r < 1 || std::abs(k - r) > 1e-9 * r) return std::nullopt;
    return static_cast<int>(r);
  }

  // Index shift j with t_i s = t_{i+j} when s is node aligned.
  std::optional<long> node_shift(double s) const {
    if (rule != QuadratureRule::log_trapezoidal || !(s > 0.0)) return std::nullopt;
    const double j = std::log(s) / log_step();
    const double r = std::round(j);
    if (std::abs(j - r) > 1e-9 * std::max(1.0, std::abs(r))) return std::nullopt;
    return static_cast<long>(r);
  }

  // Index of a node equal to t, if any.
  std::optional<std::size_t> node_index(double t) const {
    if (rule != QuadratureRule::log_trapezoidal || !(t > 0.0)) return std::nullopt;
    const double j = std::log(t / t_min) / log_step();
    const double r = std::round(j);
    if (r < 0 || r > static_cast<double>(n_nodes - 1) || std::abs(j - r) > 1e-9 * std::max(1.0, r))
      return std::nullopt;
    return static_cast<std::size_t>(r);
  }

  bool operator==(const QuadratureSpec& o) const {
    return t_min == o.t_min && t_max == o.t_max && n_nodes == o.n_nodes && rule == o.rule;
  }

  static std::pair<std::vector<double>, std::vector<double>> gauss_legendre_unit(std::size_t n) {
    std::vector<double> x(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      double z = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (std::size_t k = 2; k <= n; ++k) {
          const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
          p0 = p1;
          p1 = pk;
        }
        dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x[n - 1 - i] = z;
      w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
  }
};

// Default quadrature: 8 nodes per octave on [2^-12, 2^4].
inline QuadratureSpec default_quadrature() { return QuadratureSpec{}; }

inline QuadratureSpec octave_quadrature(int lo_exp, int hi_exp, int per_octave) {
  QuadratureSpec q;
  q.t_min = std::ldexp(1.0, lo_exp);
  q.t_max = std::ldexp(1.0, hi_exp);
  q.n_nodes = static_cast<std::size_t>((hi_exp - lo_exp) * per_octave + 1);
  return q;
}

// Uniform symmetric grid used for U and for sampled fields.
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + h * static_cast<double>(i);
  return v;
}

}  // namespace adcalc
