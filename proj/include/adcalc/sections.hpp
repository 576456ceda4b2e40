#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "adcalc/core.hpp"
#include "adcalc/grid.hpp"
#include "adcalc/profiles.hpp"

namespace adcalc {

// (x, v) on the bundle E, or (x, U, lambda) on E x R.
struct BundlePoint {
  double x = 0.0;
  double v = 0.0;
  double lambda = 0.0;
};

enum class OrbitAction { beta, alpha };

using BundleField = std::function<Complex(const BundlePoint&)>;
using SectionFamily = std::function<Complex(double, const BundlePoint&)>;

// beta_t(x, xi) = (x, t xi); alpha_t(x, U, lambda) = (x, U/t, t lambda).
inline BundlePoint orbit_point(OrbitAction a, double t, const BundlePoint& z) {
  if (a == OrbitAction::beta) return {z.x, t * z.v, z.lambda};
  return {z.x, z.v / t, t * z.lambda};
}

struct OrbitOptions {
  QuadratureSpec quad = [] {
    QuadratureSpec q;
    q.t_min = std::ldexp(1.0, -20);
    q.t_max = std::ldexp(1.0, 12);
    q.n_nodes = 32 * 32 + 1;
    return q;
  }();
  double tail_tolerance = 1e-8;
};

struct OrbitResult {
  std::vector<Complex> values;
  double tail_ratio = 0.0;
};

// z -> int_0^inf f_t(action_t(z)) dt, written as int t f_t(...) dt/t.
inline OrbitResult orbit_integrate(const SectionFamily& f, OrbitAction action, const std::vector<BundlePoint>& pts,
                                   const OrbitOptions& opt = {}) {
  const auto t = opt.quad.nodes();
  const auto w = opt.quad.weights();
  OrbitResult r;
  r.values.assign(pts.size(), 0.0);
  std::vector<double> tails(pts.size(), 0.0);
  parallel_for(pts.size(), [&](std::size_t i) {
    Complex s = 0.0;
    for (std::size_t q = 0; q < t.size(); ++q) s += w[q] * t[q] * f(t[q], orbit_point(action, t[q], pts[i]));
    r.values[i] = s;
    const double a = t.front() * std::abs(f(t.front(), orbit_point(action, t.front(), pts[i])));
    const double b = t.back() * std::abs(f(t.back(), orbit_point(action, t.back(), pts[i])));
    tails[i] = a + b;
  });
  double peak = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    peak = std::max(peak, std::abs(r.values[i]));
    tail = std::max(tail, tails[i]);
  }
  r.tail_ratio = peak > 0.0 ? tail / peak : (tail > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  require(r.tail_ratio <= opt.tail_tolerance, ErrorKind::quadrature_range,
          "integrand mass outside [t_min, t_max]: tail ratio " + std::to_string(r.tail_ratio));
  return r;
}

// f_t(x, xi) = h(|xi|^2 + t^2) / t * g(x, xi / t).
inline SectionFamily section_beta(BundleField g, BumpProfile h) {
  return [g = std::move(g), h](double t, const BundlePoint& z) -> Complex {
    const double hv = h(z.v * z.v + t * t);
    if (hv == 0.0) return 0.0;
    return hv / t * g({z.x, z.v / t, 0.0});
  };
}

struct SupportCheck {
  double x_extent = 4.0;
  double u_extent = 8.0;
  double lambda_extent = 8.0;
  std::size_t points = 41;
  double value_tolerance = 1e-12;
  double growth_tolerance = 1e-2;
};

// sup |lambda U| over the support of g (values above tolerance times peak)
// sampled on the box scaled by `scale`.
inline double support_product(const BundleField& g, const SupportCheck& c, double scale) {
  const auto xs = uniform_grid(-c.x_extent * scale, c.x_extent * scale, c.points);
  const auto us = uniform_grid(-c.u_extent * scale, c.u_extent * scale, c.points);
  const auto ls = uniform_grid(-c.lambda_extent * scale, c.lambda_extent * scale, c.points);
  std::vector<double> vals(xs.size() * us.size() * ls.size());
  double peak = 0.0;
  for (std::size_t a = 0; a < xs.size(); ++a)
    for (std::size_t b = 0; b < us.size(); ++b)
      for (std::size_t d = 0; d < ls.size(); ++d) {
        const double v = std::abs(g({xs[a], us[b], ls[d]}));
        vals[(a * us.size() + b) * ls.size() + d] = v;
        peak = std::max(peak, v);
      }
  double s = 0.0;
  for (std::size_t a = 0; a < xs.size(); ++a)
    for (std::size_t b = 0; b < us.size(); ++b)
      for (std::size_t d = 0; d < ls.size(); ++d)
        if (vals[(a * us.size() + b) * ls.size() + d] > c.value_tolerance * peak)
          s = std::max(s, std::abs(us[b] * ls[d]));
  return s;
}

// f1 = h(lambda^2 + t^2)/t g(x, tU, lambda/t) (1 - chi(lambda^2/t^2)),
// f2 = h(|U|^2 + t^{-2})/t g(x, tU, lambda/t) chi(lambda^2/t^2).
inline std::pair<SectionFamily, SectionFamily> split_alpha(BundleField g, BumpProfile h, BumpProfile chi,
                                                           const SupportCheck& check = {}) {
  h.validate();
  chi.validate();
  const double inner = support_product(g, check, 1.0);
  const double outer = support_product(g, check, 2.0);
  require(outer <= inner * (1.0 + check.growth_tolerance) + 1e-300, ErrorKind::support,
          "|lambda U| is unbounded on the support of g (" + std::to_string(inner) + " -> " + std::to_string(outer) +
              ")");
  SectionFamily f1 = [g, h, chi](double t, const BundlePoint& z) -> Complex {
    const double hv = h(z.lambda * z.lambda + t * t);
    if (hv == 0.0) return 0.0;
    const double c = 1.0 - chi(z.lambda * z.lambda / (t * t));
    if (c == 0.0) return 0.0;
    return hv / t * c * g({z.x, t * z.v, z.lambda / t});
  };
  SectionFamily f2 = [g, h, chi](double t, const BundlePoint& z) -> Complex {
    const double hv = h(z.v * z.v + 1.0 / (t * t));
    if (hv == 0.0) return 0.0;
    const double c = chi(z.lambda * z.lambda / (t * t));
    if (c == 0.0) return 0.0;
    return hv / t * c * g({z.x, t * z.v, z.lambda / t});
  };
  return {f1, f2};
}

// sup_z |f_t(z)| over a point cloud, at each t.
inline std::vector<double> section_sup(const SectionFamily& f, const std::vector<double>& ts,
                                       const std::vector<BundlePoint>& pts) {
  std::vector<double> out(ts.size(), 0.0);
  parallel_for(ts.size(), [&](std::size_t i) {
    double s = 0.0;
    for (const auto& z : pts) s = std::max(s, std::abs(f(ts[i], z)));
    out[i] = s;
  });
  return out;
}

}  // namespace adcalc
