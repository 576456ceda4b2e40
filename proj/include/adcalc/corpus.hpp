#pragma once

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "adcalc/family.hpp"
#include "adcalc/profiles.hpp"

namespace adcalc::corpus {

using Params = std::map<std::string, double>;

inline double param(const Params& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

// c(x) = 1 + amp e^{-x^2}
inline double weight_x(double x, double amp) { return 1.0 + amp * std::exp(-x * x); }

inline KernelFamily make(AnalyticGenerator gen, const GroupoidSpec& g, double sx, double su,
                         std::optional<ClassTag> claim, const QuadratureSpec& q = default_quadrature()) {
  return KernelFamily(g, std::move(gen), q.t_min, q.t_max, sx, su, claim);
}

// phi_hat = c(x) e^{-zeta^2 - t^2}; not in J since phi_hat(x,0,0) != 0.
inline KernelFamily gauss_s(const Params& p = {}, const GroupoidSpec& g = {}) {
  const double amp = param(p, "amp", 0.0);
  AnalyticGenerator gen;
  gen.name = "gauss-s";
  gen.params = {{"amp", amp}};
  gen.phi_hat = [amp](double x, double z, double t) { return Complex(weight_x(x, amp) * std::exp(-z * z - t * t)); };
  gen.phi = [amp](double x, double u, double t) {
    return Complex(weight_x(x, amp) * std::exp(-t * t - 0.25 * u * u) / (2.0 * std::sqrt(kPi)));
  };
  gen.zeta_radius = 8.0;
  return make(std::move(gen), g, g.half_width, 12.0, ClassTag::S_c);
}

// t-independent phi = c(x) e^{-U^2}, i.e. f_t(x,y) = c(x) e^{-((x-y)/t)^2}/t.
inline KernelFamily gauss_kernel(const Params& p = {}, const GroupoidSpec& g = {}) {
  const double amp = param(p, "amp", 0.0);
  AnalyticGenerator gen;
  gen.name = "gauss-kernel";
  gen.params = {{"amp", amp}};
  gen.phi = [amp](double x, double u, double) { return Complex(weight_x(x, amp) * std::exp(-u * u)); };
  gen.phi_hat = [amp](double x, double z, double) {
    return Complex(weight_x(x, amp) * std::sqrt(kPi) * std::exp(-0.25 * z * z));
  };
  gen.zeta_radius = 16.0;
  return make(std::move(gen), g, g.half_width, 6.0, ClassTag::S_c);
}

// phi_hat = c(x) w(sign zeta) psi(|zeta|) (1 + rho_amp t |zeta| rho(|zeta|)) chi_t(t)
// with psi the normalised window and chi_t = 1 on [0, t_cut0], 0 past t_cut1.
inline KernelFamily psi_window(const Params& p = {}, const GroupoidSpec& g = {},
                               const QuadratureSpec& q = default_quadrature()) {
  const double amp = param(p, "amp", 0.0);
  const double wplus = param(p, "w_plus", 1.0);
  const double wminus = param(p, "w_minus", 1.0);
  const double rho_amp = param(p, "rho_amp", 0.0);
  const double c0 = param(p, "t_cut0", 1.0), c1 = param(p, "t_cut1", 2.0);
  const auto norm = param(p, "square_norm", 0.0) != 0.0 ? PsiNormalization::square : PsiNormalization::linear;
  const auto psi = BumpProfile::psi_window(norm, param(p, "steepness", 4.0));
  AnalyticGenerator gen;
  gen.name = "psi-window";
  gen.params = p;
  gen.phi_hat = [=](double x, double z, double t) -> Complex {
    const double a = std::abs(z);
    const double pv = psi(a);
    if (pv == 0.0) return 0.0;
    const double ct = cutoff(t, c0, c1);
    if (ct == 0.0) return 0.0;
    const double rho = log_bump((a - 1.5) / 1.5, 1.0);
    return weight_x(x, amp) * (z > 0 ? wplus : wminus) * pv * (1.0 + rho_amp * t * a * rho) * ct;
  };
  gen.zeta_radius = 2.0;
  return make(std::move(gen), g, g.half_width, 64.0, ClassTag::J, q);
}

// K_0(2) = int_0^inf e^{-s^2 - 1/s^2} ds/s.
inline double flat_constant() { return boost::math::cyl_bessel_k(0, 2.0); }

// phi_hat = n c(x) (1 + beta zeta/r) e^{-r^2 - 1/r^2}, r^2 = zeta^2 + t^2; flat
// at the origin, so of infinite vanishing order.
inline KernelFamily gauss_flat(const Params& p = {}, const GroupoidSpec& g = {},
                               const QuadratureSpec& q = default_quadrature()) {
  const double amp = param(p, "amp", 0.0);
  const double beta = param(p, "beta", 0.0);
  const double n = param(p, "normalized", 1.0) != 0.0 ? 1.0 / flat_constant() : 1.0;
  AnalyticGenerator gen;
  gen.name = "gauss-flat";
  gen.params = p;
  gen.phi_hat = [=](double x, double z, double t) -> Complex {
    const double r2 = z * z + t * t;
    if (r2 == 0.0) return 0.0;
    const double e = -r2 - 1.0 / r2;
    if (e < -745.0) return 0.0;
    return n * weight_x(x, amp) * (1.0 + beta * z / std::sqrt(r2)) * std::exp(e);
  };
  gen.zeta_radius = 8.0;
  return make(std::move(gen), g, g.half_width, 40.0, ClassTag::J, q);
}

// phi_hat = zeta^4 e^{-zeta^2 - t^2}: vanishing order exactly 4 at the origin.
inline KernelFamily poly4(const GroupoidSpec& g = {}) {
  AnalyticGenerator gen;
  gen.name = "poly4";
  gen.phi_hat = [](double, double z, double t) { return Complex(z * z * z * z * std::exp(-z * z - t * t)); };
  gen.phi = [](double, double u, double t) {
    const double u2 = u * u;
    return Complex(std::exp(-t * t - 0.25 * u2) * (u2 * u2 / 16.0 - 0.75 * u2 + 0.75) / (2.0 * std::sqrt(kPi)));
  };
  gen.zeta_radius = 10.0;
  return make(std::move(gen), g, g.half_width, 16.0, ClassTag::S_c);
}

// phi = t^q e^{-U^2 - t^2}: sup |phi| ~ t^q at small t.
inline KernelFamily j0_power(double q, const GroupoidSpec& g = {}) {
  AnalyticGenerator gen;
  gen.name = "j0-power";
  gen.params = {{"q", q}};
  gen.phi = [q](double, double u, double t) { return Complex(std::pow(t, q) * std::exp(-u * u - t * t)); };
  gen.phi_hat = [q](double, double z, double t) {
    return Complex(std::pow(t, q) * std::sqrt(kPi) * std::exp(-0.25 * z * z - t * t));
  };
  gen.zeta_radius = 16.0;
  return make(std::move(gen), g, g.half_width, 6.0, ClassTag::J0);
}

struct Entry {
  std::string name;
  KernelFamily family;
  // principal symbol at m = 0 on the two half lines
  std::function<Complex(double, int)> sigma0;
};

// Five J families exercising x dependence, Hardy-type asymmetry, infinite
// order Gaussian flatness and a t-dependent profile.
inline std::vector<Entry> j_corpus(const GroupoidSpec& g = {}, const QuadratureSpec& q = default_quadrature()) {
  std::vector<Entry> v;
  v.push_back({"psi-window", psi_window({}, g, q), [](double, int) { return Complex(1.0); }});
  v.push_back({"psi-window-x", psi_window({{"amp", 0.5}}, g, q),
               [](double x, int) { return Complex(weight_x(x, 0.5)); }});
  v.push_back({"psi-hardy", psi_window({{"amp", 0.3}, {"w_plus", 1.0}, {"w_minus", 0.3}}, g, q),
               [](double x, int s) { return Complex(weight_x(x, 0.3) * (s > 0 ? 1.0 : 0.3)); }});
  v.push_back({"gauss-flat", gauss_flat({{"amp", 0.5}, {"beta", 0.5}}, g, q),
               [](double x, int s) { return Complex(weight_x(x, 0.5) * (1.0 + 0.5 * s)); }});
  v.push_back({"psi-window-t", psi_window({{"rho_amp", 0.8}}, g, q), [](double, int) { return Complex(1.0); }});
  return v;
}

inline KernelFamily by_name(const std::string& name, const Params& p, const GroupoidSpec& g,
                            const QuadratureSpec& q) {
  if (name == "zero") return KernelFamily::zero(g, q.t_min, q.t_max);
  if (name == "gauss-s") return gauss_s(p, g).with_t_range(q.t_min, q.t_max);
  if (name == "gauss-kernel") return gauss_kernel(p, g).with_t_range(q.t_min, q.t_max);
  if (name == "psi-window") return psi_window(p, g, q);
  if (name == "gauss-flat") return gauss_flat(p, g, q);
  if (name == "poly4") return poly4(g).with_t_range(q.t_min, q.t_max);
  if (name == "j0-power") return j0_power(param(p, "q", 8.0), g).with_t_range(q.t_min, q.t_max);
  fail(ErrorKind::config, "unknown family generator '" + name + "'");
}

inline std::vector<std::string> generator_names() {
  return {"zero", "gauss-s", "gauss-kernel", "psi-window", "gauss-flat", "poly4", "j0-power"};
}

}  // namespace adcalc::corpus
