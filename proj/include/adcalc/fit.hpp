#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "adcalc/core.hpp"

namespace adcalc {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  double min_local_slope = 0.0;
  std::size_t points = 0;
};

// Least squares y = a + b x, plus the smallest slope between neighbours.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::inconclusive_fit, "need at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
  LineFit f;
  f.points = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ss += r * r;
  }
  f.rms_residual = std::sqrt(ss / n);
  f.min_local_slope = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < x.size(); ++i)
    f.min_local_slope = std::min(f.min_local_slope, (y[i] - y[i - 1]) / (x[i] - x[i - 1]));
  return f;
}

struct DecayFit {
  double slope = 0.0;  // +inf when every sample vanished
  LineFit line;
  std::vector<double> scale;
  std::vector<double> magnitude;
  std::size_t vanished = 0;
};

// Fits log2 |v| against log2 r for samples at scales r -> 0 and reports the
// decay exponent q with |v| ~ r^q. Samples at or below the floor count as
// vanished. If vanished samples sit at the small scales only the larger-scale
// samples enter the fit; with fewer than two usable samples the decay is
// reported as infinite.
inline DecayFit decay_exponent(const std::vector<double>& r, const std::vector<double>& v, double floor) {
  require(r.size() == v.size(), ErrorKind::inconclusive_fit, "scale/value length mismatch");
  DecayFit d;
  d.scale = r;
  d.magnitude = v;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(std::abs(v[i]) > floor)) {
      ++d.vanished;
      continue;
    }
    lx.push_back(std::log2(r[i]));
    ly.push_back(std::log2(std::abs(v[i])));
  }
  if (lx.size() < 2) {
    d.slope = std::numeric_limits<double>::infinity();
    d.line.min_local_slope = d.slope;
    d.line.points = lx.size();
    return d;
  }
  d.line = fit_line(lx, ly);
  d.slope = d.line.slope;
  return d;
}

// Decay exponent over the `points` usable samples nearest r -> 0; infinite
// with fewer than two usable samples.
inline double tail_slope(const std::vector<double>& r, const std::vector<double>& v, double floor,
                         std::size_t points = 3) {
  std::vector<std::pair<double, double>> usable;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (std::abs(v[i]) > floor) usable.emplace_back(r[i], v[i]);
  if (usable.size() < 2) return std::numeric_limits<double>::infinity();
  std::sort(usable.begin(), usable.end());
  usable.resize(std::min(points, usable.size()));
  std::vector<double> rr, vv;
  for (const auto& [a, b] : usable) {
    rr.push_back(a);
    vv.push_back(b);
  }
  return decay_exponent(rr, vv, 0.0).slope;
}

// Least-squares convergence order of errors e(N) ~ N^{-p}.
inline double convergence_order(const std::vector<double>& n, const std::vector<double>& e) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(e[i] > 0.0)) continue;
    lx.push_back(std::log2(n[i]));
    ly.push_back(std::log2(e[i]));
  }
  if (lx.size() < 2) return std::numeric_limits<double>::infinity();
  return -fit_line(lx, ly).slope;
}

inline bool strictly_decreasing(const std::vector<double>& e) {
  for (std::size_t i = 1; i < e.size(); ++i)
    if (!(e[i] < e[i - 1])) return false;
  return true;
}

}  // namespace adcalc
