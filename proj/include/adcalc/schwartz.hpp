#pragma once

#include <boost/math/tools/minima.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "adcalc/core.hpp"
#include "adcalc/family.hpp"
#include "adcalc/fft.hpp"
#include "adcalc/fit.hpp"

namespace adcalc {

struct SemiNormIndex {
  int k = 0;  // x-derivatives
  int l = 0;  // xi-derivatives
  int j = 0;  // t-derivatives
  int m = 0;  // weight exponent

  int scaling_exponent(int p) const { return p + l + j - m; }
};

inline std::string to_string(const SemiNormIndex& i) {
  std::ostringstream s;
  s << "N(" << i.k << "," << i.l << "," << i.j << "," << i.m << ")";
  return s.str();
}

inline constexpr int kMaxDerivativeOrder = 3;

namespace detail {

// Fourth-order central difference weights and half width for d^n/dx^n.
struct FdStencil {
  int half = 0;
  std::array<double, 7> w{};  // offsets -3..3
  double scale_power = 0;
};

inline FdStencil fd_stencil(int order) {
  FdStencil s;
  switch (order) {
    case 0: s.half = 0; s.w = {0, 0, 0, 1, 0, 0, 0}; break;
    case 1: s.half = 2; s.w = {0, 1.0 / 12, -8.0 / 12, 0, 8.0 / 12, -1.0 / 12, 0}; break;
    case 2: s.half = 2; s.w = {0, -1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12, 0}; break;
    case 3: s.half = 3; s.w = {1.0 / 8, -1.0, 13.0 / 8, 0, -13.0 / 8, 1.0, -1.0 / 8}; break;
    default: fail(ErrorKind::derivative_order, "derivative order " + std::to_string(order) + " exceeds the stencil support");
  }
  s.scale_power = order;
  return s;
}

inline void check_index(const SemiNormIndex& idx) {
  for (int o : {idx.k, idx.l, idx.j}) {
    require(o >= 0, ErrorKind::derivative_order, "negative derivative order");
    require(o <= kMaxDerivativeOrder, ErrorKind::derivative_order,
            "derivative order " + std::to_string(o) + " exceeds the configured maximum " +
                std::to_string(kMaxDerivativeOrder));
  }
}

inline double grid_step(const std::vector<double>& g) {
  require(g.size() >= 2, ErrorKind::derivative_order, "grid too short for differences");
  const double h = (g.back() - g.front()) / static_cast<double>(g.size() - 1);
  for (std::size_t i = 1; i < g.size(); ++i)
    require(std::abs(g[i] - g[i - 1] - h) <= 1e-9 * std::abs(h), ErrorKind::domain,
            "semi-norms need uniform grids");
  return h;
}

inline double weight(double xi, double t, int m) {
  const double r2 = xi * xi + t * t;
  if (m == 0) return 1.0;
  if (r2 == 0.0) return m > 0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::pow(r2, 0.5 * m);
}

}  // namespace detail

// N_{k,l,j,m}(F) = sup (xi^2 + t^2)^{m/2} |d_x^k d_xi^l d_t^j F| over the grid
// nodes where the difference stencil fits. The field's second axis is xi.
inline double seminorm(const SampledField& F, const SemiNormIndex& idx) {
  detail::check_index(idx);
  const auto sx = detail::fd_stencil(idx.k), sl = detail::fd_stencil(idx.l), sj = detail::fd_stencil(idx.j);
  const std::size_t nx = F.x.size(), nk = F.u.size(), nt = F.t.size();
  const double hx = idx.k ? detail::grid_step(F.x) : 1.0;
  const double hk = idx.l ? detail::grid_step(F.u) : 1.0;
  const double ht = idx.j ? detail::grid_step(F.t) : 1.0;
  const double norm = std::pow(hx, -idx.k) * std::pow(hk, -idx.l) * std::pow(ht, -idx.j);
  const long ax = sx.half, al = sl.half, aj = sj.half;
  require(static_cast<long>(nx) > 2 * ax && static_cast<long>(nk) > 2 * al && static_cast<long>(nt) > 2 * aj,
          ErrorKind::derivative_order, "grid too small for the requested stencil");
  std::vector<double> best(nt, 0.0);
  parallel_for(nt, [&](std::size_t it) {
    if (static_cast<long>(it) < aj || static_cast<long>(it) >= static_cast<long>(nt) - aj) return;
    double local = 0.0;
    for (long ix = ax; ix < static_cast<long>(nx) - ax; ++ix)
      for (long ik = al; ik < static_cast<long>(nk) - al; ++ik) {
        Complex d = 0.0;
        for (long a = -aj; a <= aj; ++a) {
          const double wa = sj.w[a + 3];
          if (wa == 0.0) continue;
          for (long b = -ax; b <= ax; ++b) {
            const double wb = sx.w[b + 3];
            if (wb == 0.0) continue;
            for (long c = -al; c <= al; ++c) {
              const double wc = sl.w[c + 3];
              if (wc == 0.0) continue;
              d += wa * wb * wc * F.at(it + a, ix + b, ik + c);
            }
          }
        }
        const double w = detail::weight(F.u[ik], F.t[it], idx.m);
        if (std::isfinite(w)) local = std::max(local, w * std::abs(d) * norm);
      }
    best[it] = local;
  });
  double s = 0.0;
  for (double b : best) s = std::max(s, b);
  return s;
}

struct Box3 {
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};
  std::array<std::size_t, 3> points{33, 65, 65};
};

// Semi-norm of a callable field F(x,xi,t): a coarse grid locates the
// maximiser, then cyclic Brent line searches refine it with the derivative
// taken by fourth-order differences of step fd_step. The default step
// eps^{1/(4+K)}, K the total derivative order, balances truncation against
// round-off.
inline double seminorm_refined(const std::function<Complex(double, double, double)>& F, const Box3& box,
                               const SemiNormIndex& idx, std::optional<double> step = std::nullopt) {
  detail::check_index(idx);
  const double fd_step =
      step.value_or(std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (4.0 + idx.k + idx.l + idx.j)));
  std::array<detail::FdStencil, 3> st = {detail::fd_stencil(idx.k), detail::fd_stencil(idx.l),
                                         detail::fd_stencil(idx.j)};
  const double norm = std::pow(fd_step, -(idx.k + idx.l + idx.j));
  auto value = [&](const std::array<double, 3>& p) {
    Complex d = 0.0;
    for (int a = -st[0].half; a <= st[0].half; ++a) {
      const double wa = st[0].w[a + 3];
      if (wa == 0.0) continue;
      for (int b = -st[1].half; b <= st[1].half; ++b) {
        const double wb = st[1].w[b + 3];
        if (wb == 0.0) continue;
        for (int c = -st[2].half; c <= st[2].half; ++c) {
          const double wc = st[2].w[c + 3];
          if (wc == 0.0) continue;
          d += wa * wb * wc * F(p[0] + a * fd_step, p[1] + b * fd_step, p[2] + c * fd_step);
        }
      }
    }
    const double w = detail::weight(p[1], p[2], idx.m);
    return std::isfinite(w) ? w * std::abs(d) * norm : 0.0;
  };

  SampledField coarse;
  coarse.x = uniform_grid(box.lo[0], box.hi[0], box.points[0]);
  coarse.u = uniform_grid(box.lo[1], box.hi[1], box.points[1]);
  coarse.t = uniform_grid(box.lo[2], box.hi[2], box.points[2]);
  coarse.values.resize(coarse.x.size() * coarse.u.size() * coarse.t.size());
  parallel_for(coarse.t.size(), [&](std::size_t it) {
    for (std::size_t ix = 0; ix < coarse.x.size(); ++ix)
      for (std::size_t ik = 0; ik < coarse.u.size(); ++ik)
        coarse.at(it, ix, ik) = F(coarse.x[ix], coarse.u[ik], coarse.t[it]);
  });
  // Coarse values of the weighted difference quotient; the best few nodes
  // seed the refinement.
  std::vector<std::pair<double, std::array<double, 3>>> seeds;
  {
    const long hx = st[0].half, hl = st[1].half, hj = st[2].half;
    const double cx = idx.k ? detail::grid_step(coarse.x) : 1.0, cl = idx.l ? detail::grid_step(coarse.u) : 1.0,
                 ct = idx.j ? detail::grid_step(coarse.t) : 1.0;
    const double cn = std::pow(cx, -idx.k) * std::pow(cl, -idx.l) * std::pow(ct, -idx.j);
    for (long it = hj; it < static_cast<long>(coarse.t.size()) - hj; ++it)
      for (long ix = hx; ix < static_cast<long>(coarse.x.size()) - hx; ++ix)
        for (long ik = hl; ik < static_cast<long>(coarse.u.size()) - hl; ++ik) {
          Complex d = 0.0;
          for (long a = -hx; a <= hx; ++a)
            for (long b = -hl; b <= hl; ++b)
              for (long c = -hj; c <= hj; ++c) {
                const double w = st[0].w[a + 3] * st[1].w[b + 3] * st[2].w[c + 3];
                if (w != 0.0) d += w * coarse.at(it + c, ix + a, ik + b);
              }
          const double w = detail::weight(coarse.u[ik], coarse.t[it], idx.m);
          const double v = std::isfinite(w) ? w * std::abs(d) * cn : 0.0;
          seeds.push_back({v, {coarse.x[ix], coarse.u[ik], coarse.t[it]}});
        }
  }
  const std::size_t keep = std::min<std::size_t>(8, seeds.size());
  std::partial_sort(seeds.begin(), seeds.begin() + keep, seeds.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  const std::array<double, 3> cell = {(box.hi[0] - box.lo[0]) / (box.points[0] - 1),
                                      (box.hi[1] - box.lo[1]) / (box.points[1] - 1),
                                      (box.hi[2] - box.lo[2]) / (box.points[2] - 1)};
  double result = 0.0;
  for (std::size_t s = 0; s < keep; ++s) {
    auto best = seeds[s].second;
    double current = value(best);
    for (int sweep = 0; sweep < 60; ++sweep) {
      const double before = current;
      for (int axis = 0; axis < 3; ++axis) {
        const double lo = std::max(box.lo[axis], best[axis] - 2 * cell[axis]);
        const double hi = std::min(box.hi[axis], best[axis] + 2 * cell[axis]);
        auto neg = [&](double v) {
          auto p = best;
          p[axis] = v;
          return -value(p);
        };
        std::uintmax_t iters = 200;
        const auto r = boost::math::tools::brent_find_minima(neg, lo, hi, 40, iters);
        if (-r.second > current) {
          best[axis] = r.first;
          current = -r.second;
        }
      }
      if (current - before <= 1e-15 * current) break;
    }
    result = std::max(result, current);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Fourier fiber

struct FiberOptions {
  std::size_t n_u = 512;
  double u_extent = 0.0;  // half extent R of the U grid; 0 uses 2 support_u
};

// phi_hat(x, xi) = int phi(x,U,t) e^{-iU xi} dU on the U grid [-R, R) with
// trapezoidal weights; output ordered by increasing xi (second axis).
inline SampledField fourier_fiber(const KernelFamily& f, double t, const std::vector<double>& xs,
                                  FiberOptions opt = {}) {
  require(is_pow2(opt.n_u), ErrorKind::domain, "U grid size must be a power of two");
  const double r = opt.u_extent > 0.0 ? opt.u_extent : 2.0 * f.support_u();
  require(f.support_u() <= r, ErrorKind::aliasing,
          "support_radius_U exceeds half the U-grid extent");
  require(t == 0.0 || (t > 0.0 && t >= f.t_min() * (1 - 1e-12) && t <= f.t_max() * (1 + 1e-12)),
          ErrorKind::domain, "t outside the family's range");
  const std::size_t n = opt.n_u;
  const double du = 2.0 * r / static_cast<double>(n);
  const double dxi = kTwoPi / (static_cast<double>(n) * du);
  SampledField out;
  out.x = xs;
  out.t = {t};
  out.u.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.u[k] = (static_cast<double>(k) - static_cast<double>(n / 2)) * dxi;
  out.values.assign(xs.size() * n, 0.0);
  parallel_for(xs.size(), [&](std::size_t ix) {
    std::vector<Complex> v(n), w(n);
    for (std::size_t q = 0; q < n; ++q) {
      const double u = -r + du * static_cast<double>(q);
      v[q] = t == 0.0 ? f.phi0(xs[ix], u) : f.phi(xs[ix], u, t);
    }
    fft::forward(v.data(), w.data(), n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t src = (k + n / 2) % n;  // fftshift
      const double xi = out.u[k];
      out.at(0, ix, k) = du * std::polar(1.0, r * xi) * w[src];
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// classification

struct ClassifyOptions {
  std::size_t x_samples = 9;
  std::size_t u_samples = 65;
  double q_max = 6.0;
  double order_threshold = 6.0;
  double residual_threshold = 0.1;
  int annulus_min = 1;
  int annulus_max = 6;
  std::size_t angles = 33;
  double vanish_floor = 1e-300;
  double overflow_guard = 1e300;
  std::vector<SemiNormIndex> indices;
  double xi_extent = 6.0;
  std::size_t xi_points = 49;
  double t_lo = 0.05, t_hi = 3.05;
  std::size_t t_points = 25;
  std::size_t x_points = 13;
};

inline std::vector<SemiNormIndex> default_seminorm_indices() {
  std::vector<SemiNormIndex> v;
  for (int k = 0; k <= 1; ++k)
    for (int l = 0; l <= 1; ++l)
      for (int j = 0; j <= 1; ++j)
        for (int m = 0; m <= 2; ++m) v.push_back({k, l, j, m});
  return v;
}

struct SeminormRow {
  SemiNormIndex index;
  double value = 0.0;
  bool finite = true;
};

struct ClassReport {
  ClassTag cls = ClassTag::none;
  double vanishing_order = 0.0;
  double j0_slope = 0.0;
  double annulus_residual = 0.0;
  bool annulus_inner_window = false;
  DecayFit j0_fit;
  DecayFit annulus_fit;
  std::vector<SeminormRow> table;
};

namespace detail {

inline std::string raw_data(const DecayFit& d) {
  std::ostringstream s;
  s.precision(17);
  for (std::size_t i = 0; i < d.scale.size(); ++i) s << (i ? "; " : "") << d.scale[i] << " -> " << d.magnitude[i];
  return s.str();
}

}  // namespace detail

inline ClassReport classify(const KernelFamily& f, ClassifyOptions opt = {}) {
  if (opt.indices.empty()) opt.indices = default_seminorm_indices();
  ClassReport rep;
  const auto xs = uniform_grid(-f.support_x(), f.support_x(), opt.x_samples);

  // Superpolynomial decay of sup |phi| along t_min 2^k.
  {
    const auto us = uniform_grid(-f.support_u(), f.support_u(), opt.u_samples);
    std::vector<double> ts, sup(6, 0.0);
    for (int k = 0; k < 6; ++k) ts.push_back(f.t_min() * std::ldexp(1.0, k));
    if (!f.known_zero()) {
      parallel_for(ts.size(), [&](std::size_t i) {
        double s = 0.0;
        for (double x : xs)
          for (double u : us) s = std::max(s, std::abs(f.phi(x, u, ts[i])));
        sup[i] = s;
      });
    }
    rep.j0_fit = decay_exponent(ts, sup, opt.vanish_floor);
    rep.j0_slope = rep.j0_fit.slope;
    const bool j0 = std::isinf(rep.j0_slope) ||
                    (rep.j0_slope >= opt.q_max && rep.j0_fit.line.min_local_slope >= opt.q_max);
    if (j0) {
      rep.cls = ClassTag::J0;
      rep.vanishing_order = std::numeric_limits<double>::infinity();
      return rep;
    }
  }

  // Semi-norm table on the Fourier side.
  {
    SampledField F;
    F.x = uniform_grid(-f.support_x(), f.support_x(), opt.x_points);
    F.u = uniform_grid(-opt.xi_extent, opt.xi_extent, opt.xi_points);
    F.t = uniform_grid(opt.t_lo, opt.t_hi, opt.t_points);
    F.values.resize(F.x.size() * F.u.size() * F.t.size());
    parallel_for(F.t.size(), [&](std::size_t it) {
      for (std::size_t ix = 0; ix < F.x.size(); ++ix)
        for (std::size_t ik = 0; ik < F.u.size(); ++ik) F.at(it, ix, ik) = f.phi_hat(F.x[ix], F.u[ik], F.t[it]);
    });
    for (const auto& idx : opt.indices) {
      const double v = seminorm(F, idx);
      rep.table.push_back({idx, v, std::isfinite(v) && v < opt.overflow_guard});
    }
  }
  bool sc = true;
  for (const auto& row : rep.table)
    if (row.index.m >= 0 && !row.finite) sc = false;
  if (!sc) {
    rep.cls = ClassTag::none;
    return rep;
  }

  // Vanishing order of phi_hat at (xi,t) = (0,0) on annuli 2^{-k}.
  std::vector<double> radii, mags;
  for (int k = opt.annulus_min; k <= opt.annulus_max; ++k) {
    const double r = std::ldexp(1.0, -k);
    double m = 0.0;
    for (double x : xs)
      for (std::size_t a = 0; a < opt.angles; ++a) {
        const double th = kPi * static_cast<double>(a) / static_cast<double>(opt.angles - 1);
        const double xi = r * std::cos(th), t = r * std::sin(th);
        const Complex v = t <= 0.0 ? f.phi_hat0(x, xi) : f.phi_hat(x, xi, t);
        m = std::max(m, std::abs(v));
      }
    radii.push_back(r);
    mags.push_back(m);
  }
  rep.annulus_fit = decay_exponent(radii, mags, opt.vanish_floor);
  if (!std::isinf(rep.annulus_fit.slope) && rep.annulus_fit.line.rms_residual > opt.residual_threshold &&
      radii.size() > 3) {
    // Outer annuli not yet asymptotic: refit on the innermost three.
    const std::vector<double> r(radii.end() - 3, radii.end()), m(mags.end() - 3, mags.end());
    auto inner = decay_exponent(r, m, opt.vanish_floor);
    if (std::isinf(inner.slope) || inner.line.rms_residual <= opt.residual_threshold) {
      inner.scale = radii;
      inner.magnitude = mags;
      rep.annulus_fit = inner;
      rep.annulus_inner_window = true;
    }
  }
  rep.vanishing_order = rep.annulus_fit.slope;
  rep.annulus_residual = rep.annulus_fit.line.rms_residual;
  const auto& d = rep.annulus_fit;
  if (std::isinf(d.slope)) {
    rep.cls = ClassTag::J;
    return rep;
  }
  // Local slope between the two smallest usable annuli.
  double tail_slope = d.slope;
  {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < radii.size(); ++i)
      if (mags[i] > opt.vanish_floor) pts.push_back({std::log2(radii[i]), std::log2(mags[i])});
    if (pts.size() >= 2) {
      const auto& a = pts[pts.size() - 2];
      const auto& b = pts.back();
      tail_slope = (b.second - a.second) / (b.first - a.first);
    }
    if (d.vanished > 0) tail_slope = std::numeric_limits<double>::infinity();
  }
  if (d.slope >= opt.order_threshold && tail_slope >= opt.order_threshold) {
    rep.cls = ClassTag::J;
  } else if (d.slope < opt.order_threshold && d.line.rms_residual <= opt.residual_threshold &&
             tail_slope < opt.order_threshold) {
    rep.cls = ClassTag::S_c;
  } else {
    fail(ErrorKind::inconclusive_fit, "annulus regression slope " + std::to_string(d.slope) + ", residual " +
                                          std::to_string(d.line.rms_residual) + "; raw data " + detail::raw_data(d));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// pairing with a test function on the algebroid

struct PairingOptions {
  std::size_t n_v = 4096;
  double dv = 0.0;  // 0 picks pi / (2 zeta_radius) or support_u / 512
};

struct PairingTable {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<std::vector<Complex>> values;  // [t][x]
  std::vector<Complex> limit;                // F(x, 0) = phi_hat_0(x, 0) g(x, 0)
  std::vector<double> deviation;             // max_x |F(x,t) - F(x,0)|
  std::vector<double> sup;                   // max_x |F(x,t)|
};

namespace detail {

// phi(x, V_q, t) on V_q = (q - n/2) dv, from the closed form when present and
// by one inverse FFT of phi_hat otherwise.
inline std::vector<Complex> phi_line(const KernelFamily& f, double x, double t, std::size_t n, double dv) {
  std::vector<Complex> out(n);
  const bool direct = !f.is_analytic() || static_cast<bool>(f.analytic().phi) || f.known_zero();
  if (direct) {
    for (std::size_t q = 0; q < n; ++q) {
      const double v = (static_cast<double>(q) - static_cast<double>(n / 2)) * dv;
      out[q] = f.phi(x, v, t);
    }
    return out;
  }
  const double dz = kTwoPi / (static_cast<double>(n) * dv);
  std::vector<Complex> a(n), b(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double z = (static_cast<double>(k) - static_cast<double>(n / 2)) * dz;
    a[(k + n / 2) % n] = f.phi_hat(x, z, t);
  }
  fft::backward(a.data(), b.data(), n);
  // b[q'] = sum_k a_k e^{2 pi i q' k/n} with V_q = (q - n/2) dv.
  for (std::size_t q = 0; q < n; ++q) {
    const std::size_t src = (q + n / 2) % n;
    out[q] = b[src] * dz / kTwoPi;
  }
  return out;
}

}  // namespace detail

// F(x,t) = t^{-1} int g(x,U) phi(x, U/t, t) dU = int g(x, tV) phi(x,V,t) dV.
inline PairingTable pairing_limit(const KernelFamily& f, const std::function<Complex(double, double)>& g,
                                  const std::vector<double>& ts, const std::vector<double>& xs,
                                  PairingOptions opt = {}) {
  require(is_pow2(opt.n_v), ErrorKind::domain, "V grid size must be a power of two");
  double dv = opt.dv;
  if (dv <= 0.0) {
    const bool direct = !f.is_analytic() || static_cast<bool>(f.analytic().phi) || f.known_zero();
    dv = direct ? 4.0 * f.support_u() / static_cast<double>(opt.n_v) : kPi / (2.0 * f.analytic().zeta_radius);
  }
  PairingTable tab;
  tab.t = ts;
  tab.x = xs;
  tab.values.assign(ts.size(), std::vector<Complex>(xs.size()));
  tab.limit.resize(xs.size());
  for (std::size_t ix = 0; ix < xs.size(); ++ix) tab.limit[ix] = f.phi_hat0(xs[ix], 0.0) * g(xs[ix], 0.0);
  parallel_for(ts.size(), [&](std::size_t it) {
    const double t = ts[it];
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      if (t == 0.0) {
        tab.values[it][ix] = tab.limit[ix];
        continue;
      }
      const auto line = detail::phi_line(f, xs[ix], t, opt.n_v, dv);
      Complex s = 0.0;
      for (std::size_t q = 0; q < opt.n_v; ++q) {
        const double v = (static_cast<double>(q) - static_cast<double>(opt.n_v / 2)) * dv;
        if (line[q] != Complex(0.0)) s += g(xs[ix], t * v) * line[q];
      }
      tab.values[it][ix] = s * dv;
    }
  });
  for (std::size_t it = 0; it < ts.size(); ++it) {
    double dev = 0.0, sup = 0.0;
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      dev = std::max(dev, std::abs(tab.values[it][ix] - tab.limit[ix]));
      sup = std::max(sup, std::abs(tab.values[it][ix]));
    }
    tab.deviation.push_back(dev);
    tab.sup.push_back(sup);
  }
  return tab;
}

}  // namespace adcalc
