#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>

#include "adcalc/core.hpp"
#include "adcalc/fft.hpp"
#include "adcalc/grid.hpp"

namespace adcalc {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Kernel matrix K(x_j, x_l) on a periodic grid; acts by v -> K v dx.
class DiscreteOperator {
 public:
  DiscreteOperator() = default;
  DiscreteOperator(GridSpec g, Matrix kernel, std::optional<double> support = std::nullopt)
      : grid_(g), k_(std::move(kernel)), support_(support) {
    g.validate();
    require(static_cast<std::size_t>(k_.rows()) == g.n && static_cast<std::size_t>(k_.cols()) == g.n,
            ErrorKind::grid_mismatch, "kernel matrix does not match the grid");
  }

  static DiscreteOperator zero(const GridSpec& g) { return {g, Matrix::Zero(g.n, g.n)}; }
  static DiscreteOperator identity(const GridSpec& g) {
    return {g, Matrix::Identity(g.n, g.n) / g.dx()};
  }

  // Single-t kernel sampled at grid nodes; support is the radius in x - y.
  static DiscreteOperator sample(const GridSpec& g, const std::function<Complex(double, double)>& k,
                                 std::optional<double> support = std::nullopt) {
    Matrix m(g.n, g.n);
    for (std::size_t j = 0; j < g.n; ++j)
      for (std::size_t l = 0; l < g.n; ++l) m(j, l) = k(g.x(j), g.x(l));
    return {g, std::move(m), support};
  }

  // Kohn-Nirenberg assembly from left-symbol values a(x_j, xi_k) on the FFT
  // bins. The Nyquist bin takes the mean of a(x, +xi_N) and a(x, -xi_N).
  static DiscreteOperator from_symbol(const GridSpec& g, const std::function<Complex(std::size_t, double)>& a) {
    const std::size_t n = g.n;
    Matrix m(n, n);
    parallel_for(n, [&](std::size_t j) {
      std::vector<Complex> s(n), c(n);
      bool any = false;
      for (std::size_t k = 0; k < n; ++k) {
        s[k] = k == n / 2 ? 0.5 * (a(j, g.nyquist()) + a(j, -g.nyquist())) : a(j, g.xi(k));
        any = any || s[k] != Complex(0.0);
      }
      if (!any) {
        m.row(j).setZero();
        return;
      }
      fft::backward(s.data(), c.data(), n);
      const double scale = 1.0 / (static_cast<double>(n) * g.dx());
      for (std::size_t l = 0; l < n; ++l) m(j, l) = c[(j + n - l) % n] * scale;
    });
    return {g, std::move(m)};
  }

  // Same, from a precomputed table a[j][k] in FFT order.
  static DiscreteOperator from_symbol_table(const GridSpec& g, const Matrix& table) {
    return from_symbol(g, [&](std::size_t j, double xi) {
      const double k = xi / g.dxi();
      long kk = std::lround(k);
      if (kk < 0) kk += static_cast<long>(g.n);
      return table(static_cast<long>(j), kk % static_cast<long>(g.n));
    });
  }

  const GridSpec& grid() const { return grid_; }
  const Matrix& kernel() const { return k_; }
  double weight() const { return grid_.dx(); }
  Matrix matrix() const { return k_ * grid_.dx(); }
  std::optional<double> support() const { return support_; }
  bool is_zero() const { return k_.isZero(0.0); }

  Vector apply(const Vector& v) const {
    require(static_cast<std::size_t>(v.size()) == grid_.n, ErrorKind::grid_mismatch, "vector length mismatch");
    return k_ * v * grid_.dx();
  }

  DiscreteOperator compose(const DiscreteOperator& b) const {
    require(grid_ == b.grid_, ErrorKind::grid_mismatch, "composition across different grids");
    std::optional<double> sup;
    if (support_ && b.support_) {
      sup = *support_ + *b.support_;
      require(*sup < grid_.half_width, ErrorKind::support, "composed support exceeds the domain");
    }
    return {grid_, k_ * b.k_ * grid_.dx(), sup};
  }

  DiscreteOperator adjoint() const { return {grid_, k_.adjoint(), support_}; }

  DiscreteOperator operator+(const DiscreteOperator& b) const {
    require(grid_ == b.grid_, ErrorKind::grid_mismatch, "sum across different grids");
    return {grid_, k_ + b.k_};
  }
  DiscreteOperator operator-(const DiscreteOperator& b) const {
    require(grid_ == b.grid_, ErrorKind::grid_mismatch, "difference across different grids");
    return {grid_, k_ - b.k_};
  }
  DiscreteOperator operator*(Complex s) const { return {grid_, k_ * s, support_}; }
  DiscreteOperator operator*(const DiscreteOperator& b) const { return compose(b); }

  // Spectral norm of the linear map v -> K v dx.
  double norm() const {
    if (is_zero()) return 0.0;
    const Matrix a = matrix();
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.adjoint() * a, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }

  // Left symbol on the FFT bins: (P e_k)(x_j) / e_k(x_j), table [j][k].
  Matrix probe_symbol() const {
    const std::size_t n = grid_.n;
    Matrix out(n, n);
    parallel_for(n, [&](std::size_t j) {
      std::vector<Complex> r(n), s(n);
      for (std::size_t q = 0; q < n; ++q) r[q] = k_(static_cast<long>(j), static_cast<long>((j + n - q) % n));
      fft::forward(r.data(), s.data(), n);
      for (std::size_t k = 0; k < n; ++k) out(static_cast<long>(j), static_cast<long>(k)) = s[k] * grid_.dx();
    });
    return out;
  }

  // Left symbol at an arbitrary frequency, with x - y taken as the minimal image.
  Complex symbol_at(std::size_t j, double xi) const {
    Complex s = 0.0;
    for (std::size_t l = 0; l < grid_.n; ++l) {
      const double d = grid_.minimal_image(grid_.x(j) - grid_.x(l));
      s += k_(static_cast<long>(j), static_cast<long>(l)) * std::polar(1.0, -d * xi);
    }
    return s * grid_.dx();
  }

 private:
  GridSpec grid_;
  Matrix k_;
  std::optional<double> support_;
};

inline DiscreteOperator operator*(Complex s, const DiscreteOperator& a) { return a * s; }

inline Vector apply(const DiscreteOperator& a, const Vector& v) { return a.apply(v); }

inline Vector sample_function(const GridSpec& g, const std::function<Complex(double)>& f) {
  Vector v(g.n);
  for (std::size_t j = 0; j < g.n; ++j) v(static_cast<long>(j)) = f(g.x(j));
  return v;
}

// Discrete L^2 norm with weight dx.
inline double l2_norm(const GridSpec& g, const Vector& v) { return std::sqrt(g.dx()) * v.norm(); }

inline double relative_difference(const Matrix& a, const Matrix& b) {
  const double s = std::max(a.norm(), b.norm());
  return s == 0.0 ? 0.0 : (a - b).norm() / s;
}

}  // namespace adcalc
