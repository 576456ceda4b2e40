#pragma once

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "adcalc/core.hpp"
#include "adcalc/geometry.hpp"
#include "adcalc/grid.hpp"

namespace adcalc {

enum class ClassTag { none, S_c, J0, J };

inline std::string to_string(ClassTag c) {
  switch (c) {
    case ClassTag::none: return "none";
    case ClassTag::S_c: return "S_c";
    case ClassTag::J0: return "J0";
    case ClassTag::J: return "J";
  }
  return "none";
}

using FieldFn = std::function<Complex(double, double, double)>;

// Closed-form family. Either phi(x,U,t) or phi_hat(x,zeta,t) may be left
// empty; the other is then obtained by numerical Fourier transform.
struct AnalyticGenerator {
  std::string name;
  std::map<std::string, double> params;
  FieldFn phi;
  FieldFn phi_hat;
  // phi_hat is negligible beyond this radius (used by the inverse transform)
  double zeta_radius = 16.0;
  // phi_hat(x, zeta, 0) is the t -> 0 limit, so the fiber at 0 needs no
  // extrapolation
  bool smooth_at_zero = true;
  bool known_zero = false;
};

// Dense samples phi(x_i, U_k, t_j) stored [t][x][U].
struct SampledField {
  std::vector<double> x, u, t;
  std::vector<Complex> values;

  std::size_t index(std::size_t it, std::size_t ix, std::size_t iu) const {
    return (it * x.size() + ix) * u.size() + iu;
  }
  Complex& at(std::size_t it, std::size_t ix, std::size_t iu) { return values[index(it, ix, iu)]; }
  const Complex& at(std::size_t it, std::size_t ix, std::size_t iu) const { return values[index(it, ix, iu)]; }

  void validate() const {
    auto increasing = [](const std::vector<double>& g) {
      for (std::size_t i = 1; i < g.size(); ++i)
        if (!(g[i] > g[i - 1])) return false;
      return !g.empty();
    };
    require(increasing(x) && increasing(u) && increasing(t), ErrorKind::format, "sampled grids must be strictly increasing");
    require(values.size() == x.size() * u.size() * t.size(), ErrorKind::format, "sample tensor size mismatch");
  }
};

namespace detail {

// Four-point Lagrange stencil on an increasing grid; falls back to linear
// when fewer than four points exist.
struct Stencil {
  std::size_t start = 0;
  std::size_t count = 0;
  std::array<double, 4> w{};
};

inline Stencil lagrange_stencil(const std::vector<double>& g, double v) {
  Stencil s;
  const std::size_t n = g.size();
  if (n == 1) {
    s.count = 1;
    s.w[0] = 1.0;
    return s;
  }
  const std::size_t width = std::min<std::size_t>(4, n);
  auto it = std::upper_bound(g.begin(), g.end(), v);
  long i = static_cast<long>(it - g.begin()) - 1;
  long start = i - static_cast<long>(width / 2) + 1;
  start = std::clamp<long>(start, 0, static_cast<long>(n - width));
  s.start = static_cast<std::size_t>(start);
  s.count = width;
  for (std::size_t a = 0; a < width; ++a) {
    double w = 1.0;
    for (std::size_t b = 0; b < width; ++b)
      if (a != b) w *= (v - g[s.start + b]) / (g[s.start + a] - g[s.start + b]);
    s.w[a] = w;
  }
  return s;
}

}  // namespace detail

// (8 F(h) - 6 F(2h) + F(4h)) / 3 cancels the O(h) and O(h^2) terms.
template <class F>
auto richardson_zero(F&& fn, double h) {
  return (8.0 * fn(h) - 6.0 * fn(2.0 * h) + fn(4.0 * h)) / 3.0;
}

// t -> f_t on the pair groupoid of R, stored in normal coordinates
// phi(x,U,t) = t f_t(x, x - tU).
class KernelFamily {
 public:
  KernelFamily() : KernelFamily(zero()) {}

  KernelFamily(GroupoidSpec g, AnalyticGenerator gen, double t_min, double t_max, double support_x,
               double support_u, std::optional<ClassTag> claimed = std::nullopt)
      : groupoid_(g),
        repr_(std::make_shared<const AnalyticGenerator>(std::move(gen))),
        t_min_(t_min),
        t_max_(t_max),
        support_x_(support_x),
        support_u_(support_u),
        claimed_(claimed) {
    validate();
    const auto& a = analytic();
    require(static_cast<bool>(a.phi) || static_cast<bool>(a.phi_hat) || a.known_zero, ErrorKind::domain,
            "analytic generator needs phi or phi_hat");
  }

  KernelFamily(GroupoidSpec g, SampledField field, double support_x, double support_u,
               std::optional<ClassTag> claimed = std::nullopt)
      : groupoid_(g),
        repr_(std::make_shared<const SampledField>(std::move(field))),
        support_x_(support_x),
        support_u_(support_u),
        claimed_(claimed) {
    const auto& s = sampled();
    s.validate();
    t_min_ = s.t.front();
    t_max_ = s.t.back();
    validate();
  }

  static KernelFamily zero(GroupoidSpec g = {}, double t_min = std::ldexp(1.0, -12), double t_max = 16.0) {
    AnalyticGenerator gen;
    gen.name = "zero";
    gen.known_zero = true;
    gen.phi = [](double, double, double) { return Complex(0.0); };
    gen.phi_hat = gen.phi;
    return KernelFamily(g, std::move(gen), t_min, t_max, g.half_width, 1.0, ClassTag::J0);
  }

  const GroupoidSpec& groupoid() const { return groupoid_; }
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  double support_x() const { return support_x_; }
  double support_u() const { return support_u_; }
  std::optional<ClassTag> claimed_class() const { return claimed_; }
  int p() const { return groupoid_.fiber_dim; }

  bool is_analytic() const { return std::holds_alternative<std::shared_ptr<const AnalyticGenerator>>(repr_); }
  const AnalyticGenerator& analytic() const { return *std::get<std::shared_ptr<const AnalyticGenerator>>(repr_); }
  const SampledField& sampled() const { return *std::get<std::shared_ptr<const SampledField>>(repr_); }
  bool known_zero() const { return is_analytic() && analytic().known_zero; }
  std::string name() const { return is_analytic() ? analytic().name : std::string("sampled"); }

  KernelFamily with_claim(std::optional<ClassTag> c) const {
    KernelFamily f = *this;
    f.claimed_ = c;
    return f;
  }

  KernelFamily with_t_range(double t_min, double t_max) const {
    KernelFamily f = *this;
    f.t_min_ = t_min;
    f.t_max_ = t_max;
    f.validate();
    return f;
  }

  // Normal-coordinate value phi(x,U,t).
  Complex phi(double x, double u, double t) const {
    if (is_analytic()) {
      const auto& a = analytic();
      if (a.known_zero) return 0.0;
      if (a.phi) return a.phi(x, u, t);
      return inverse_transform(x, u, t);
    }
    return sampled_phi(x, u, t);
  }

  // Fourier transform along U: int phi(x,U,t) e^{-iU zeta} dU.
  Complex phi_hat(double x, double zeta, double t) const {
    if (is_analytic()) {
      const auto& a = analytic();
      if (a.known_zero) return 0.0;
      if (a.phi_hat) return a.phi_hat(x, zeta, t);
      return forward_transform(x, zeta, t);
    }
    return sampled_phi_hat(x, zeta, t);
  }

  // Fiber at t = 0: the limit value for smooth analytic generators,
  // Richardson extrapolation along t_min 2^k otherwise.
  Complex phi_hat0(double x, double zeta) const {
    if (is_analytic() && analytic().smooth_at_zero) return phi_hat(x, zeta, 0.0);
    return richardson_zero([&](double t) { return phi_hat(x, zeta, t); }, t_min_);
  }

  Complex phi0(double x, double u) const {
    if (is_analytic() && analytic().smooth_at_zero) return phi(x, u, 0.0);
    return richardson_zero([&](double t) { return phi(x, u, t); }, t_min_);
  }

  // f_t(x,y) = t^{-1} phi(x, (x-y)/t, t), t != 0.
  Complex kernel(double t, double x, double y) const {
    require(t != 0.0, ErrorKind::domain, "kernel needs t != 0");
    return phi(x, (x - y) / t, t) / std::abs(t);
  }

 private:
  void validate() const {
    groupoid_.validate();
    require(t_min_ > 0.0 && t_max_ > t_min_, ErrorKind::domain, "t_range needs 0 < t_min < t_max");
    require(support_x_ > 0.0 && support_u_ > 0.0, ErrorKind::domain, "support radii must be positive");
  }

  static constexpr std::size_t kTransformPoints = 4096;

  Complex inverse_transform(double x, double u, double t) const {
    const auto& a = analytic();
    const double z = a.zeta_radius;
    const double h = 2.0 * z / static_cast<double>(kTransformPoints);
    Complex s = 0.0;
    for (std::size_t k = 0; k <= kTransformPoints; ++k) {
      const double zeta = -z + h * static_cast<double>(k);
      const double w = (k == 0 || k == kTransformPoints) ? 0.5 : 1.0;
      s += w * a.phi_hat(x, zeta, t) * std::polar(1.0, u * zeta);
    }
    return s * h / kTwoPi;
  }

  Complex forward_transform(double x, double zeta, double t) const {
    const auto& a = analytic();
    const double r = support_u_;
    const double h = 2.0 * r / static_cast<double>(kTransformPoints);
    Complex s = 0.0;
    for (std::size_t k = 0; k <= kTransformPoints; ++k) {
      const double u = -r + h * static_cast<double>(k);
      const double w = (k == 0 || k == kTransformPoints) ? 0.5 : 1.0;
      s += w * a.phi(x, u, t) * std::polar(1.0, -u * zeta);
    }
    return s * h;
  }

  Complex sampled_at_xt(std::size_t iu, const detail::Stencil& sx, const detail::Stencil& st) const {
    const auto& f = sampled();
    Complex v = 0.0;
    for (std::size_t a = 0; a < st.count; ++a)
      for (std::size_t b = 0; b < sx.count; ++b) v += st.w[a] * sx.w[b] * f.at(st.start + a, sx.start + b, iu);
    return v;
  }

  bool outside(const std::vector<double>& g, double v) const { return v < g.front() || v > g.back(); }

  Complex sampled_phi(double x, double u, double t) const {
    const auto& f = sampled();
    if (outside(f.x, x) || outside(f.u, u) || t > f.t.back()) return 0.0;
    if (t < f.t.front()) {
      const Complex p0 = phi0(x, u), p1 = sampled_phi(x, u, f.t.front());
      return p0 + (p1 - p0) * (t / f.t.front());
    }
    const auto sx = detail::lagrange_stencil(f.x, x);
    const auto su = detail::lagrange_stencil(f.u, u);
    std::vector<double> lt(f.t.size());
    for (std::size_t i = 0; i < lt.size(); ++i) lt[i] = std::log(f.t[i]);
    const auto st = detail::lagrange_stencil(lt, std::log(t));
    Complex v = 0.0;
    for (std::size_t c = 0; c < su.count; ++c) v += su.w[c] * sampled_at_xt(su.start + c, sx, st);
    return v;
  }

  Complex sampled_phi_hat(double x, double zeta, double t) const {
    const auto& f = sampled();
    if (outside(f.x, x) || t > f.t.back()) return 0.0;
    if (t < f.t.front()) {
      const Complex p0 = phi_hat0(x, zeta), p1 = sampled_phi_hat(x, zeta, f.t.front());
      return p0 + (p1 - p0) * (t / f.t.front());
    }
    const auto sx = detail::lagrange_stencil(f.x, x);
    std::vector<double> lt(f.t.size());
    for (std::size_t i = 0; i < lt.size(); ++i) lt[i] = std::log(f.t[i]);
    const auto st = detail::lagrange_stencil(lt, std::log(t));
    const double du = (f.u.back() - f.u.front()) / static_cast<double>(f.u.size() - 1);
    Complex s = 0.0;
    for (std::size_t k = 0; k < f.u.size(); ++k) {
      const double w = (k == 0 || k + 1 == f.u.size()) ? 0.5 : 1.0;
      s += w * sampled_at_xt(k, sx, st) * std::polar(1.0, -f.u[k] * zeta);
    }
    return s * du;
  }

  GroupoidSpec groupoid_;
  std::variant<std::shared_ptr<const AnalyticGenerator>, std::shared_ptr<const SampledField>> repr_;
  double t_min_ = 0.0;
  double t_max_ = 0.0;
  double support_x_ = 1.0;
  double support_u_ = 1.0;
  std::optional<ClassTag> claimed_;
};

// Family given at kernel level, f_t(x,y); normal coordinates are
// phi(x,U,t) = t f_t(x, x - tU).
inline KernelFamily from_kernel(GroupoidSpec g, std::string name,
                                std::function<Complex(double, double, double)> kernel_t_x_y, double t_min,
                                double t_max, double support_x, double support_u,
                                std::optional<ClassTag> claimed = std::nullopt) {
  AnalyticGenerator gen;
  gen.name = std::move(name);
  gen.smooth_at_zero = false;
  gen.phi = [k = std::move(kernel_t_x_y)](double x, double u, double t) { return t * k(t, x, x - t * u); };
  return KernelFamily(g, std::move(gen), t_min, t_max, support_x, support_u, claimed);
}

// Samples phi on the given x, U and t grids. t = 0 entries take the
// extrapolated fiber.
inline SampledField normal_coords(const KernelFamily& f, const std::vector<double>& xs, const std::vector<double>& us,
                                  const std::vector<double>& ts, const Chart& chart = Chart{}) {
  for (double t : ts)
    require(std::abs(t) * f.support_u() < chart.domain_radius(), ErrorKind::support,
            "rescaled support leaves the chart domain at t = " + std::to_string(t));
  SampledField s{xs, us, ts, std::vector<Complex>(xs.size() * us.size() * ts.size())};
  parallel_for(ts.size(), [&](std::size_t it) {
    const double t = ts[it];
    for (std::size_t ix = 0; ix < xs.size(); ++ix)
      for (std::size_t iu = 0; iu < us.size(); ++iu)
        s.at(it, ix, iu) = t == 0.0 ? f.phi0(xs[ix], us[iu]) : f.phi(xs[ix], us[iu], t);
  });
  return s;
}

// Pullback of a normal-coordinate field along the DNC action,
// phi(x,U,t) -> phi(x, U/u, ut); Fourier side u^p phi_hat(x, u zeta, u t).
inline KernelFamily pullback_alpha(const KernelFamily& f, double u) {
  require(u > 0.0, ErrorKind::domain, "pullback_alpha needs u > 0");
  AnalyticGenerator gen;
  gen.name = f.name() + "|pullback";
  gen.params = {{"u", u}};
  gen.known_zero = f.known_zero();
  gen.phi = [f, u](double x, double v, double t) { return f.phi(x, v / u, u * t); };
  gen.phi_hat = [f, u](double x, double zeta, double t) { return u * f.phi_hat(x, u * zeta, u * t); };
  if (f.is_analytic()) {
    gen.zeta_radius = f.analytic().zeta_radius / u;
    gen.smooth_at_zero = f.analytic().smooth_at_zero;
  } else {
    gen.smooth_at_zero = false;
  }
  return KernelFamily(f.groupoid(), std::move(gen), f.t_min() / u, f.t_max() / u, f.support_x(), f.support_u() * u,
                      f.claimed_class());
}

// Algebra automorphism (alpha_u f)_t = f_{ut}; Fourier side phi_hat(x, u zeta, u t).
inline KernelFamily alpha_automorphism(const KernelFamily& f, double u) {
  require(u > 0.0, ErrorKind::domain, "alpha_automorphism needs u > 0");
  AnalyticGenerator gen;
  gen.name = f.name() + "|alpha";
  gen.params = {{"u", u}};
  gen.known_zero = f.known_zero();
  gen.phi = [f, u](double x, double v, double t) { return f.phi(x, v / u, u * t) / u; };
  gen.phi_hat = [f, u](double x, double zeta, double t) { return f.phi_hat(x, u * zeta, u * t); };
  if (f.is_analytic()) {
    gen.zeta_radius = f.analytic().zeta_radius / u;
    gen.smooth_at_zero = f.analytic().smooth_at_zero;
  } else {
    gen.smooth_at_zero = false;
  }
  return KernelFamily(f.groupoid(), std::move(gen), f.t_min() / u, f.t_max() / u, f.support_x(), f.support_u() * u,
                      f.claimed_class());
}

}  // namespace adcalc
