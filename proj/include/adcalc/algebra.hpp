#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "adcalc/family.hpp"
#include "adcalc/fit.hpp"
#include "adcalc/operator.hpp"

namespace adcalc {

// Class of a product: J0 and J absorb everything; two S_c factors stay S_c.
inline ClassTag product_tag(ClassTag a, ClassTag b) {
  if (a == ClassTag::J0 || b == ClassTag::J0) return ClassTag::J0;
  if (a == ClassTag::J || b == ClassTag::J) return ClassTag::J;
  if (a == ClassTag::S_c && b == ClassTag::S_c) return ClassTag::S_c;
  return ClassTag::none;
}

// A kernel family realized on a grid at the nodes of a t-quadrature.
// Nodes are produced lazily; materialize() caches them. Indices outside the
// node range read as zero unless a continuous-t evaluator is attached.
class GridFamily {
 public:
  using NodeFn = std::function<DiscreteOperator(std::size_t)>;
  using TimeFn = std::function<DiscreteOperator(double)>;

  GridFamily() = default;
  GridFamily(GridSpec g, QuadratureSpec q, NodeFn node, ClassTag tag, TimeFn at_t = {}, std::string name = {})
      : grid_(g), quad_(q), node_(std::move(node)), at_t_(std::move(at_t)), tag_(tag), name_(std::move(name)) {
    g.validate();
    q.validate();
    nodes_ = quad_.nodes();
  }

  static GridFamily zero(const GridSpec& g, const QuadratureSpec& q) {
    return {g, q, [g](std::size_t) { return DiscreteOperator::zero(g); }, ClassTag::J0,
            [g](double) { return DiscreteOperator::zero(g); }, "zero"};
  }

  const GridSpec& grid() const { return grid_; }
  const QuadratureSpec& quad() const { return quad_; }
  const std::vector<double>& ts() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  ClassTag tag() const { return tag_; }
  const std::string& name() const { return name_; }
  bool continuous() const { return static_cast<bool>(at_t_); }

  GridFamily with_tag(ClassTag t) const {
    GridFamily c = *this;
    c.tag_ = t;
    return c;
  }

  DiscreteOperator node(std::size_t i) const {
    require(i < nodes_.size(), ErrorKind::range, "node index out of range");
    if (cache_) return (*cache_)[i];
    return node_(i);
  }

  // Node i + shift, continuing past the ends through the t evaluator if any.
  DiscreteOperator node_shifted(std::size_t i, long shift) const {
    const long k = static_cast<long>(i) + shift;
    if (k >= 0 && k < static_cast<long>(nodes_.size())) return node(static_cast<std::size_t>(k));
    if (at_t_) return at_t_(nodes_[i] * std::exp(static_cast<double>(shift) * quad_.log_step()));
    return DiscreteOperator::zero(grid_);
  }

  DiscreteOperator at(double t) const {
    if (auto i = quad_.node_index(t)) return node(*i);
    require(static_cast<bool>(at_t_), ErrorKind::range, "t is not a quadrature node and no continuous evaluator");
    return at_t_(t);
  }

  GridFamily materialize() const {
    if (cache_) return *this;
    auto store = std::make_shared<std::vector<DiscreteOperator>>(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) (*store)[i] = node_(i);
    GridFamily c = *this;
    c.cache_ = store;
    c.node_ = [store](std::size_t i) { return (*store)[i]; };
    return c;
  }

  // Same operators, reparametrised by an arbitrary node map.
  GridFamily map(std::function<DiscreteOperator(const DiscreteOperator&)> fn, ClassTag tag, std::string name) const {
    const GridFamily self = *this;
    TimeFn tf;
    if (at_t_) tf = [self, fn](double t) { return fn(self.at_t_(t)); };
    return {grid_, quad_, [self, fn](std::size_t i) { return fn(self.node(i)); }, tag, tf, std::move(name)};
  }

  void check_compatible(const GridFamily& o) const {
    require(grid_ == o.grid_, ErrorKind::grid_mismatch, "families live on different grids");
    require(quad_ == o.quad_, ErrorKind::grid_mismatch, "families use different t-quadratures");
  }

 private:
  friend GridFamily convolve(const GridFamily&, const GridFamily&);
  GridSpec grid_;
  QuadratureSpec quad_;
  NodeFn node_;
  TimeFn at_t_;
  ClassTag tag_ = ClassTag::none;
  std::string name_;
  std::vector<double> nodes_;
  std::shared_ptr<std::vector<DiscreteOperator>> cache_;
};

// f_t on the grid: Kohn-Nirenberg operator with symbol phi_hat(x, t xi, t).
inline DiscreteOperator realize_at(const KernelFamily& f, const GridSpec& g, double t) {
  require(t > 0.0, ErrorKind::domain, "realization needs t > 0");
  if (f.known_zero()) return DiscreteOperator::zero(g);
  return DiscreteOperator::from_symbol(g, [&](std::size_t j, double xi) { return f.phi_hat(g.x(j), t * xi, t); });
}

inline GridFamily realize(const KernelFamily& f, const GridSpec& g, const QuadratureSpec& q) {
  const auto ts = q.nodes();
  const ClassTag tag = f.known_zero() ? ClassTag::J0 : f.claimed_class().value_or(ClassTag::none);
  return {g, q, [f, g, ts](std::size_t i) { return realize_at(f, g, ts[i]); }, tag,
          [f, g](double t) { return realize_at(f, g, t); }, f.name()};
}

// (f*g)_t = f_t g_t with the dx-weighted matrix product at each node.
inline GridFamily convolve(const GridFamily& f, const GridFamily& g) {
  f.check_compatible(g);
  GridFamily::TimeFn tf;
  if (f.continuous() && g.continuous()) tf = [f, g](double t) { return f.at_t_(t).compose(g.at_t_(t)); };
  return {f.grid(), f.quad(),
          [f, g](std::size_t i) {
            auto a = f.node(i);
            if (a.is_zero()) return a;
            auto b = g.node(i);
            if (b.is_zero()) return b;
            return a.compose(b);
          },
          product_tag(f.tag(), g.tag()), tf, f.name() + "*" + g.name()};
}

// f_t * g for a fixed single-t kernel g; J families become J0.
inline GridFamily convolve(const GridFamily& f, const DiscreteOperator& g) {
  require(f.grid() == g.grid(), ErrorKind::grid_mismatch, "kernel lives on a different grid");
  const ClassTag tag = (f.tag() == ClassTag::J || f.tag() == ClassTag::J0) ? ClassTag::J0 : ClassTag::none;
  return f.map([g](const DiscreteOperator& a) { return a.is_zero() ? a : a.compose(g); }, tag, f.name() + "*k");
}

inline GridFamily convolve(const DiscreteOperator& g, const GridFamily& f) {
  require(f.grid() == g.grid(), ErrorKind::grid_mismatch, "kernel lives on a different grid");
  const ClassTag tag = (f.tag() == ClassTag::J || f.tag() == ClassTag::J0) ? ClassTag::J0 : ClassTag::none;
  return f.map([g](const DiscreteOperator& a) { return a.is_zero() ? a : g.compose(a); }, tag, "k*" + f.name());
}

inline GridFamily adjoint(const GridFamily& f) {
  return f.map([](const DiscreteOperator& a) { return a.adjoint(); }, f.tag(), f.name() + "^*");
}

// sup |phi(x,U,t)| = t max |K_t| at each node.
inline std::vector<double> node_sup(const GridFamily& f) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto a = f.node(i);
    out[i] = f.ts()[i] * a.kernel().cwiseAbs().maxCoeff();
  }
  return out;
}

struct J0Report {
  std::vector<double> t;
  std::vector<double> sup;
  DecayFit fit;
  double tail_slope = 0.0;  // over the three smallest usable t
};

// Decay of sup |phi| along nodes t_min 2^k with t <= t_fit_max; the
// slope is d log sup / d log t, large for J0 families.
inline J0Report j0_decay(const GridFamily& f, double t_fit_max = 1.0, double floor = 1e-13) {
  const auto per = f.quad().nodes_per_octave();
  require(per.has_value(), ErrorKind::grid_mismatch, "j0_decay needs dyadic-aligned nodes");
  J0Report r;
  double peak = 0.0;
  for (std::size_t i = 0; i < f.size(); i += static_cast<std::size_t>(*per)) {
    if (f.ts()[i] > t_fit_max * (1.0 + 1e-12)) break;
    r.t.push_back(f.ts()[i]);
    r.sup.push_back(f.ts()[i] * f.node(i).kernel().cwiseAbs().maxCoeff());
    peak = std::max(peak, r.sup.back());
  }
  r.fit = decay_exponent(r.t, r.sup, floor * std::max(peak, 1e-300));
  r.tail_slope = tail_slope(r.t, r.sup, floor * std::max(peak, 1e-300));
  return r;
}

struct LimitReport {
  std::vector<double> t;
  std::vector<double> deviation;
  double order = 0.0;
};

// F(x,y,t) = (f_t * g)(x,y) against the limit fhat0(x,0) g(x,y).
inline LimitReport smooth_limit(const GridFamily& f, const DiscreteOperator& g,
                                const std::function<Complex(double)>& fhat0_at_zero, const std::vector<double>& ts) {
  const auto& grid = f.grid();
  Matrix lim = g.kernel();
  for (std::size_t j = 0; j < grid.n; ++j) lim.row(static_cast<long>(j)) *= fhat0_at_zero(grid.x(j));
  LimitReport r;
  for (double t : ts) {
    const auto ft = f.at(t).compose(g);
    r.t.push_back(t);
    r.deviation.push_back((ft.kernel() - lim).cwiseAbs().maxCoeff());
  }
  std::vector<double> n(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) n[i] = 1.0 / ts[i];
  r.order = convergence_order(n, r.deviation);
  return r;
}

// Fourier fiber phi_hat(x_j, zeta, 0) extracted from the grid nodes by
// Richardson extrapolation along t0, 2 t0, ..., 2^{L-1} t0 (L = levels),
// cancelling the powers t, ..., t^{L-1}. zeta = 2^{L-1} t0 xi_k so that
// zeta / t is a frequency bin at every level. Returns [j][k] over the
// returned zetas.
struct GridFiber {
  std::vector<double> zeta;
  Matrix values;
};

namespace detail {

// c_m with sum_m c_m 2^{m p} = [p == 0] for p < levels.
inline std::vector<double> richardson_weights(int levels) {
  Eigen::MatrixXd a(levels, levels);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(levels);
  b(0) = 1.0;
  for (int p = 0; p < levels; ++p)
    for (int m = 0; m < levels; ++m) a(p, m) = std::ldexp(1.0, m * p);
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  return {c.data(), c.data() + levels};
}

}  // namespace detail

inline GridFiber fiber_at_zero(const GridFamily& f, double t0, double zeta_lo, double zeta_hi, int levels = 3) {
  require(levels >= 1 && levels <= 6, ErrorKind::range, "Richardson levels must lie in [1, 6]");
  const auto i0 = f.quad().node_index(t0);
  const auto per = f.quad().nodes_per_octave();
  require(i0.has_value() && per.has_value(), ErrorKind::grid_mismatch, "t0 must be a dyadic-aligned node");
  const std::size_t p = static_cast<std::size_t>(*per);
  const auto top = static_cast<std::size_t>(levels - 1);
  require(*i0 + top * p < f.size(), ErrorKind::range, "Richardson levels exceed the node range");
  const auto& g = f.grid();
  std::vector<Matrix> sym;
  for (std::size_t m = 0; m <= top; ++m) sym.push_back(f.node(*i0 + m * p).probe_symbol());
  const auto c = detail::richardson_weights(levels);
  const long n = static_cast<long>(g.n);
  const long stretch = 1L << top;
  GridFiber out;
  std::vector<long> ks;
  for (long k = -(n / 2 - 1) / stretch; k <= (n / 2 - 1) / stretch; ++k) {
    const double z = static_cast<double>(stretch) * t0 * static_cast<double>(k) * g.dxi();
    if (std::abs(z) < zeta_lo || std::abs(z) > zeta_hi) continue;
    ks.push_back(k);
    out.zeta.push_back(z);
  }
  require(!ks.empty(), ErrorKind::range, "no resolved zeta in the requested window");
  out.values.resize(n, static_cast<long>(ks.size()));
  auto bin = [n](long k) { return ((k % n) + n) % n; };
  for (long j = 0; j < n; ++j)
    for (std::size_t col = 0; col < ks.size(); ++col) {
      Complex v = 0.0;
      for (std::size_t m = 0; m <= top; ++m) v += c[m] * sym[m](j, bin(ks[col] * (stretch >> m)));
      out.values(j, static_cast<long>(col)) = v;
    }
  return out;
}

}  // namespace adcalc
