#pragma once

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <string>

#include "adcalc/core.hpp"

namespace adcalc {

// exp(-a / (1 - y^2)) on (-1, 1), zero outside.
inline double log_bump(double y, double a) {
  if (!(std::abs(y) < 1.0)) return 0.0;
  return std::exp(-a / (1.0 - y * y));
}

// C-infinity step: 0 for y <= 0, 1 for y >= 1.
inline double smooth_step(double y) {
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) return 1.0;
  const double p = std::exp(-1.0 / y), q = std::exp(-1.0 / (1.0 - y));
  return p / (p + q);
}

// Equals 1 for r <= r0 and 0 for r >= r1.
inline double cutoff(double r, double r0, double r1) { return smooth_step((r1 - r) / (r1 - r0)); }

enum class ProfileKind { h_profile, chi_cutoff, psi_window };
enum class PsiNormalization { linear, square };

// Bump profiles built on log-variable bumps.
//   h-profile:  h(r) = c b(ln r / (2 ln 2)), so h(s^2) lives on s in (1/2, 2)
//   psi-window: psi(t) = c b(2 log2 t - 1), supported in (1, 2)
//   chi-cutoff: 1 on [0, r0], 0 on [r1, inf)
struct BumpProfile {
  ProfileKind kind = ProfileKind::psi_window;
  PsiNormalization normalization = PsiNormalization::linear;
  double steepness = 4.0;
  double scale = 1.0;
  double r0 = 1.0;
  double r1 = 2.0;

  static double bump_integral(double a, int power) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate([a, power](double y) { return std::pow(log_bump(y, a), power); }, -1.0, 1.0);
  }

  static BumpProfile h_profile(double a = 4.0) {
    BumpProfile p;
    p.kind = ProfileKind::h_profile;
    p.steepness = a;
    p.scale = 1.0 / (std::log(2.0) * bump_integral(a, 1));
    return p;
  }

  static BumpProfile psi_window(PsiNormalization norm = PsiNormalization::linear, double a = 4.0) {
    BumpProfile p;
    p.kind = ProfileKind::psi_window;
    p.normalization = norm;
    p.steepness = a;
    const double half_ln2 = 0.5 * std::log(2.0);
    p.scale = norm == PsiNormalization::linear ? 1.0 / (half_ln2 * bump_integral(a, 1))
                                               : 1.0 / std::sqrt(half_ln2 * bump_integral(a, 2));
    return p;
  }

  static BumpProfile chi_cutoff(double r0 = 1.0, double r1 = 2.0) {
    BumpProfile p;
    p.kind = ProfileKind::chi_cutoff;
    p.r0 = r0;
    p.r1 = r1;
    return p;
  }

  double operator()(double r) const {
    switch (kind) {
      case ProfileKind::h_profile:
        if (!(r > 0.0)) return 0.0;
        return scale * log_bump(std::log(r) / (2.0 * std::log(2.0)), steepness);
      case ProfileKind::psi_window:
        if (!(r > 1.0 && r < 2.0)) return 0.0;
        return scale * log_bump(2.0 * std::log2(r) - 1.0, steepness);
      case ProfileKind::chi_cutoff:
        return cutoff(r, r0, r1);
    }
    return 0.0;
  }

  double support_lo() const { return kind == ProfileKind::h_profile ? 0.25 : kind == ProfileKind::psi_window ? 1.0 : 0.0; }
  double support_hi() const { return kind == ProfileKind::h_profile ? 4.0 : kind == ProfileKind::psi_window ? 2.0 : r1; }

  // The normalisation integral in the profile's own measure, by tanh-sinh in
  // the log variable: int h(s^2) ds/s, int psi dt/t or int psi^2 dt/t.
  double normalization_integral() const {
    boost::math::quadrature::tanh_sinh<double> ts;
    if (kind == ProfileKind::h_profile) {
      return ts.integrate([this](double s) { return (*this)(std::exp(2.0 * s)); }, -std::log(2.0), std::log(2.0));
    }
    if (kind == ProfileKind::psi_window) {
      const int power = normalization == PsiNormalization::linear ? 1 : 2;
      return ts.integrate([this, power](double s) { return std::pow((*this)(std::exp(s)), power); }, 0.0,
                          std::log(2.0));
    }
    return 1.0;
  }

  void validate() const {
    require(steepness > 0.0 && std::isfinite(steepness), ErrorKind::profile, "bump steepness must be positive");
    if (kind == ProfileKind::chi_cutoff) {
      require(0.0 < r0 && r0 < r1, ErrorKind::profile, "chi cutoff needs 0 < r0 < r1");
      return;
    }
    const double v = normalization_integral();
    require(std::abs(v - 1.0) <= 1e-10, ErrorKind::profile,
            "profile normalisation is " + std::to_string(v) + ", expected 1");
  }
};

}  // namespace adcalc
