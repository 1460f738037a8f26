#pragma once

// Radial geometry of the unit disk: r-grids with annulus cells, profiles
// sampled at cell centers, xi = r^2 grids for mass functions, and the closed
// form mass/mu identities used as oracles by both solvers.

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace chemomass {

inline constexpr double kPi = std::numbers::pi;

/// Annulus finite-volume grid on [0,1]. Immutable after construction.
class RadialGrid {
 public:
  static std::shared_ptr<const RadialGrid> uniform(std::size_t n);
  /// Faces must start at exactly 0, end at exactly 1 and increase strictly.
  static std::shared_ptr<const RadialGrid> from_faces(std::vector<double> faces);
  /// Spacing at most h_inner on [0, r_split] and at most h_outer beyond, both
  /// zones uniform.
  static std::shared_ptr<const RadialGrid> two_zone(double r_split, double h_inner, double h_outer);

  std::size_t size() const { return centers_.size(); }
  std::span<const double> faces() const { return faces_; }
  std::span<const double> centers() const { return centers_; }
  /// pi (r_{i+1}^2 - r_i^2)
  std::span<const double> areas() const { return areas_; }
  double width(std::size_t i) const { return faces_[i + 1] - faces_[i]; }
  double min_width() const;

 private:
  explicit RadialGrid(std::vector<double> faces);

  std::vector<double> faces_;
  std::vector<double> centers_;
  std::vector<double> areas_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Cell-centered samples of a radial field (u, v, w or initial data).
class RadialProfile {
 public:
  RadialProfile(GridPtr grid, std::vector<double> values);
  /// Samples f at the cell centers.
  template <class F>
  static RadialProfile sample(GridPtr grid, F&& f) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->centers()[i]);
    return RadialProfile(std::move(grid), std::move(v));
  }
  static RadialProfile constant(GridPtr grid, double c);

  const RadialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Linear interpolation between cell centers, constant beyond the outermost ones.
  double at(double r) const;
  double max() const;
  double min() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// (delta, tau, m). The critical mass is 8 pi delta.
struct ModelParams {
  double delta = 1.0;
  double tau = 1.0;
  double m = 4.0 * kPi;

  ModelParams() = default;
  ModelParams(double delta_, double tau_, double m_);

  double critical_mass() const { return 8.0 * kPi * delta; }
  /// delta / tau, the decay rate of the memory kernel.
  double kernel_rate() const { return delta / tau; }
  ModelParams with_mass(double m_) const { return {delta, tau, m_}; }
};

/// Nodes in xi = r^2 in [0,1], xi[0] = 0 and xi[last] = 1 exactly.
class XiGrid {
 public:
  explicit XiGrid(std::vector<double> nodes);
  static XiGrid uniform(std::size_t nxi);
  /// 0, then geometric nodes from xi_min with ratio q until the spacing reaches
  /// h_max, then uniform spacing up to 1. Used when the solution concentrates at
  /// scales far below any practical uniform spacing.
  static XiGrid graded(double xi_min, double q, double h_max);

  std::size_t size() const { return xi_.size(); }
  std::span<const double> nodes() const { return xi_; }
  double operator[](std::size_t j) const { return xi_[j]; }
  double spacing(std::size_t j) const { return xi_[j + 1] - xi_[j]; }

 private:
  std::vector<double> xi_;
};

/// Cumulative radial integral  M(xi) = int_0^{sqrt xi} r f(r) dr  of a
/// piecewise-constant profile. Piecewise linear in xi with knots at r_faces^2,
/// hence exact at every xi.
class MassFunction {
 public:
  explicit MassFunction(const RadialProfile& f);

  double operator()(double xi) const;
  /// d/dxi M = f(sqrt xi)/2 (right-continuous at knots).
  double slope(double xi) const;
  double total() const { return cum_.back(); }
  std::vector<double> sample(const XiGrid& xig) const;

 private:
  std::vector<double> knots_;  // r_faces^2
  std::vector<double> cum_;
  std::vector<double> half_values_;
};

/// 2 pi int_0^1 r f dr by exact annulus (midpoint) quadrature.
double integrate_disk(const RadialProfile& f);

/// U(xi) = int_0^{sqrt xi} r u dr at every node. Requires u >= 0.
std::vector<double> mass_function(const RadialProfile& u, const XiGrid& xig);

struct W0Moments {
  std::vector<double> W0;
  double kappa0 = 0.0;
};
/// W0 = mass function of w0, kappa0 = W0(1).
W0Moments w0_moments(const RadialProfile& w0, const XiGrid& xig);

/// int_0^t exp(-k (t-s)) ds, continuous at k = 0.
inline double memory_weight(double k, double t) {
  if (k == 0.0) return t;
  return -std::expm1(-k * t) / k;
}

/// Exact weights of int_0^dt e^{-k (dt-s)} g(s) ds when g is the linear
/// interpolant of g(0) and g(dt): the integral equals old_w g(0) + new_w g(dt).
/// For k = 0 this is the trapezoidal rule.
struct HoldWeights {
  double old_w = 0.0;
  double new_w = 0.0;
};
HoldWeights hold_weights(double k, double dt);

/// Mean of w over the disk at time t given int w0 and the conserved mass.
double mu_closed_form(const ModelParams& p, double w0_mass, double t);

/// int_Omega w(t): the same identity multiplied by |Omega| = pi.
inline double w_mass_closed_form(const ModelParams& p, double w0_mass, double t) {
  return kPi * mu_closed_form(p, w0_mass, t);
}

/// CSV with header "r,value", 17 significant digits, LF endings.
void write_profile_csv(std::ostream& os, const RadialProfile& f);
/// CSV with header "xi,value".
void write_xi_csv(std::ostream& os, const XiGrid& xig, std::span<const double> values);

}  // namespace chemomass
