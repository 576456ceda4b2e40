#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "adcalc/operator.hpp"
#include "adcalc/profiles.hpp"

namespace adcalc {

// Value of a homogeneous term on the cosphere: sign = +1 or -1 in n = 1.
using CosphereFn = std::function<Complex(double, int)>;

// a(x, xi) ~ sum_k |xi|^{m-k} a_{m-k}(x, sign xi), each term multiplied by
// 1 - chi(|xi|) with chi = 1 below cutoff/2 and 0 above cutoff. An optional
// smooth remainder is added as is.
class ClassicalSymbol {
 public:
  ClassicalSymbol() = default;
  ClassicalSymbol(int order, std::vector<CosphereFn> terms, double cutoff_radius = 1.0,
                  std::function<Complex(double, double)> remainder = {})
      : order_(order), terms_(std::move(terms)), cutoff_(cutoff_radius), remainder_(std::move(remainder)) {
    require(cutoff_ >= 0.0, ErrorKind::cutoff, "negative low-frequency cutoff");
  }

  static ClassicalSymbol constant(Complex c) {
    return {0, {[c](double, int) { return c; }}, 0.0};
  }
  // Smoothed cut to zero at low frequency, 1 above the cutoff radius.
  static ClassicalSymbol high_pass(double cutoff_radius = 1.0) {
    return {0, {[](double, int) { return Complex(1.0); }}, cutoff_radius};
  }
  static ClassicalSymbol principal(CosphereFn sigma0, double cutoff_radius = 1.0) {
    return {0, {std::move(sigma0)}, cutoff_radius};
  }

  int order() const { return order_; }
  double cutoff_radius() const { return cutoff_; }
  const std::vector<CosphereFn>& terms() const { return terms_; }
  Complex principal_value(double x, int sign) const { return terms_.empty() ? Complex(0.0) : terms_[0](x, sign); }

  double low_frequency_weight(double r) const {
    if (cutoff_ == 0.0) return 1.0;
    return 1.0 - adcalc::cutoff(r, 0.5 * cutoff_, cutoff_);
  }

  // Homogeneous term k alone, without cutoff.
  Complex term(std::size_t k, double x, double xi) const {
    const double r = std::abs(xi);
    const int d = order_ - static_cast<int>(k);
    const int s = xi >= 0.0 ? 1 : -1;
    if (r == 0.0) {
      if (d > 0) return 0.0;
      return terms_[k](x, 1);
    }
    return std::pow(r, d) * terms_[k](x, s);
  }

  Complex operator()(double x, double xi) const {
    Complex v = 0.0;
    const double w = low_frequency_weight(std::abs(xi));
    if (w != 0.0)
      for (std::size_t k = 0; k < terms_.size(); ++k) v += term(k, x, xi);
    v *= w;
    if (remainder_) v += remainder_(x, xi);
    return v;
  }

  // True if some term is not smooth at xi = 0, probed on sample points.
  bool singular_at_zero(const std::vector<double>& xs) const {
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      const int d = order_ - static_cast<int>(k);
      if (d < 0) {
        for (double x : xs)
          if (terms_[k](x, 1) != Complex(0.0) || terms_[k](x, -1) != Complex(0.0)) return true;
        continue;
      }
      const double parity = (d % 2 == 0) ? 1.0 : -1.0;
      for (double x : xs) {
        const Complex p = terms_[k](x, 1), m = terms_[k](x, -1);
        if (std::abs(m - parity * p) > 1e-14 * (1.0 + std::abs(p))) return true;
      }
    }
    return false;
  }

 private:
  int order_ = 0;
  std::vector<CosphereFn> terms_;
  double cutoff_ = 1.0;
  std::function<Complex(double, double)> remainder_;
};

// (Pg)(x) = (2 pi)^{-1} int e^{i x xi} a(x, xi) ghat(xi) dxi on the grid.
inline DiscreteOperator kn_quantize(const ClassicalSymbol& a, const GridSpec& g) {
  if (a.cutoff_radius() == 0.0)
    require(!a.singular_at_zero(g.xs()), ErrorKind::cutoff, "symbol is singular at xi = 0 and has no cutoff");
  return DiscreteOperator::from_symbol(g, [&](std::size_t j, double xi) { return a(g.x(j), xi); });
}

inline DiscreteOperator kn_quantize(const std::function<Complex(double, double)>& a, const GridSpec& g) {
  return DiscreteOperator::from_symbol(g, [&](std::size_t j, double xi) { return a(g.x(j), xi); });
}

// An operator with its declared symbol and order.
struct QuantizedOperator {
  DiscreteOperator op;
  int order = 0;
  std::optional<ClassicalSymbol> symbol;

  static QuantizedOperator from_symbol(const ClassicalSymbol& a, const GridSpec& g) {
    return {kn_quantize(a, g), a.order(), a};
  }
};

}  // namespace adcalc
