#pragma once

#include <cmath>
#include <limits>
#include <variant>

#include "adcalc/core.hpp"

namespace adcalc {

enum class GroupoidKind { pair_groupoid };

struct GroupoidSpec {
  GroupoidKind kind = GroupoidKind::pair_groupoid;
  int fiber_dim = 1;
  double half_width = 8.0;

  void validate() const {
    require(fiber_dim >= 1, ErrorKind::domain, "fiber_dim must be >= 1");
    require(fiber_dim == 1, ErrorKind::domain, "only fiber_dim = 1 is implemented");
    require(half_width > 0.0 && std::isfinite(half_width), ErrorKind::domain, "half_width must be positive");
  }
};

struct GroupoidElement {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const GroupoidElement&) const = default;
};

struct AlgebroidVector {
  double x = 0.0;
  double u = 0.0;
  bool operator==(const AlgebroidVector&) const = default;
};

// A point of the deformation space: a groupoid element at t != 0, an algebroid
// vector at t = 0.
struct DncPoint {
  double t = 0.0;
  std::variant<GroupoidElement, AlgebroidVector> payload;

  static DncPoint at_zero(double x, double u) { return {0.0, AlgebroidVector{x, u}}; }
  static DncPoint at(double t, double x, double y) { return {t, GroupoidElement{x, y}}; }

  bool on_algebroid() const { return std::holds_alternative<AlgebroidVector>(payload); }
  const GroupoidElement& element() const { return std::get<GroupoidElement>(payload); }
  const AlgebroidVector& vector() const { return std::get<AlgebroidVector>(payload); }
  double base() const { return on_algebroid() ? vector().x : element().x; }
};

// Affine exponential chart theta(x,U) = (x, x-U). r(theta(x,U)) = x.
class Chart {
 public:
  explicit Chart(GroupoidSpec g = {}, double domain_radius = std::numeric_limits<double>::infinity())
      : groupoid_(g), radius_(domain_radius) {
    g.validate();
    require(domain_radius > 0.0, ErrorKind::domain, "theta_domain_radius must be positive");
  }

  const GroupoidSpec& groupoid() const { return groupoid_; }
  double domain_radius() const { return radius_; }

  GroupoidElement theta(double x, double u) const {
    require(std::abs(u) < radius_, ErrorKind::domain, "|U| outside the chart domain");
    return {x, x - u};
  }

  AlgebroidVector theta_inverse(const GroupoidElement& g) const {
    const double u = g.x - g.y;
    require(std::abs(u) < radius_, ErrorKind::domain, "element outside the chart image");
    return {g.x, u};
  }

  // Theta(x,U,t) = (theta(x,tU), t) for t != 0 and (x,U,0) at t = 0.
  DncPoint big_theta(double x, double u, double t) const {
    if (t == 0.0) return DncPoint::at_zero(x, u);
    const auto g = theta(x, t * u);
    return DncPoint::at(t, g.x, g.y);
  }

 private:
  GroupoidSpec groupoid_;
  double radius_;
};

inline GroupoidElement theta_chart(double x, double u, const Chart& c = Chart{}) { return c.theta(x, u); }

inline AlgebroidVector theta_chart_inverse(const GroupoidElement& g, const Chart& c = Chart{}) {
  return c.theta_inverse(g);
}

inline DncPoint big_theta(double x, double u, double t, const Chart& c = Chart{}) { return c.big_theta(x, u, t); }

// alpha_u(z, t) = (z, u t) on t != 0 and alpha_u(x, U, 0) = (x, U/u, 0).
inline DncPoint alpha_act(double u, const DncPoint& p) {
  require(u > 0.0 && std::isfinite(u), ErrorKind::domain, "alpha_act needs u > 0");
  if (p.on_algebroid()) return DncPoint::at_zero(p.vector().x, p.vector().u / u);
  return DncPoint::at(u * p.t, p.element().x, p.element().y);
}

}  // namespace adcalc
