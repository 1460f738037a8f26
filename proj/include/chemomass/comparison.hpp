#pragma once

// Explicit comparison functions for the mass-function equation P[U] = 0.
//
// Subsolution family (supercritical mass):
//   Ubar(xi,t) = a xi / (b + xi)                         for xi <= xi0,
//              = (a b xi + a xi0^2) / (b + xi0)^2         for xi >  xi0,
//   b(t) = b0 e^{-alpha t},  a(t) = m/(2 pi) (b + xi0)^2 / (b + xi0^2),
// so that Ubar(1,t) = m/2pi and Ubar_xi(0,t) = a/b grows like e^{alpha t}.
//
// Supersolution (subcritical mass): Obar(xi) = a xi / (b + xi) with
// a = m/(2 pi) (b + 1 + eps), giving U <= C xi with C = a / b.

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chemomass/radial_core.hpp"
#include "chemomass/transformed_solver.hpp"

namespace chemomass {

struct SubsolutionSpec {
  double xi0 = 0.0;
  double b0 = 0.0;
  double alpha = 0.0;
  double t0 = 0.0;
  double m = 0.0;
  double eta = 0.0;
  double eps = 0.0;
  double c1 = 0.0;

  double b(double t) const;
  double b_prime(double t) const;
  double a(double t) const;
  double a_prime(double t) const;
  void validate() const;
};

double ubar_eval(const SubsolutionSpec& s, double xi, double t);
double ubar_xi(const SubsolutionSpec& s, double xi, double t);
double ubar_xixi(const SubsolutionSpec& s, double xi, double t);
double ubar_t(const SubsolutionSpec& s, double xi, double t);
/// a(t)/b(t), the slope of the barrier at the origin; u(0,t) >= 2 a/b.
double ubar_slope_at_origin(const SubsolutionSpec& s, double t);

/// P[Ubar] for 0 < xi < xi0 from the normalized closed form; the memory
/// integral against 1/(b(s)+xi) is evaluated by adaptive Gauss-Kronrod.
double ubar_parab_inner(const SubsolutionSpec& s, const OperatorContext& ctx, double xi, double t);
/// P[Ubar] for xi0 < xi < 1, same construction.
double ubar_parab_outer(const SubsolutionSpec& s, const OperatorContext& ctx, double xi, double t);
/// P[Ubar] from finite differences of ubar_eval in xi and t and direct quadrature
/// of the memory term; independent of the closed forms above. *scale, when
/// given, receives the sum of the magnitudes of the individual terms of P.
double ubar_parab_numeric(const SubsolutionSpec& s, const OperatorContext& ctx, double xi, double t,
                          double* scale = nullptr);

/// Outer drift part a'xi/a + b'xi/b + a'xi0^2/(ab) - 2(b'xi + b'xi0^2/b)/(b+xi0), evaluated term by term.
double outer_drift_direct(const SubsolutionSpec& s, double xi, double t);
/// Its simplified form -(b'/b) xi0^2 (1 - xi) / (b + xi0^2).
double outer_drift_identity(const SubsolutionSpec& s, double xi, double t);

// ------------------------------------------------------------------ recipes

struct InnerParams {
  double eps = 0.0;
  double c1 = 0.0;
  double alpha_star = 0.0;
  double xi0 = 0.0;
  bool delta_zero_limit = false;
};

/// (1-eps)^3 m / ((1+eps) pi delta) - 8, requires delta > 0.
double inner_margin_c1(const ModelParams& p, double eps);

/// eps: the largest eps in (0,1/2] with c1 > 0, halved; alpha_star = min(c1/4,
/// delta ln(1/(1-eps)) / (tau ln(1/eps))); xi0 = eps/2. For delta = 0 the limit
/// path is used (eps = 1/4, alpha_star from the kernel-free time integral).
/// Throws RegimeError unless m > 8 pi delta.
InnerParams choose_inner_params(const ModelParams& p);

/// 0.9 min{ m / (2 pi tau e^{delta/tau}), 2 eta0 / e^{2 delta/tau}, alpha_star }.
double choose_outer_alpha(const ModelParams& p, double eta0, double alpha_star);

/// b0 = eps xi0^2 / 2,  t0 = (2/alpha) ln(1/(1-eps)).
std::pair<double, double> choose_b0_t0(double alpha, double eps, double xi0);

/// 1/2 { (1/xi0 + 1) alpha + (8/b0) e^{alpha t0} } e^{delta t0 / tau}.
double gamma0(double alpha, double b0, double xi0, double t0, const ModelParams& p);

struct GrowUpConstants {
  double R = 0.0;
  double Gamma_u = 0.0;
  double gamma_small = 0.0;
  double Gamma_w = 0.0;
  double Gamma0 = 0.0;
  double alpha_star = 0.0;
  bool delta_zero_limit = false;
  SubsolutionSpec barrier;
};

/// Chains choose_inner_params -> choose_outer_alpha(eta/2) -> choose_b0_t0 -> gamma0.
GrowUpConstants grow_up_constants(double m, double eta, const ModelParams& p);

struct InitialData {
  RadialProfile u0;
  RadialProfile w0;
};

/// Worst-case margins of the averaged conditions on the data, evaluated at every
/// interior face radius (>= 0 means satisfied).
struct DataConditionReport {
  /// mean_{B_r} u0 - Gamma_u b0/(b0 + r^2), r < R. This is the form the
  /// comparison argument needs (U0 >= Ubar(.,0) on (0, xi0)).
  double inner_u_margin = 0.0;
  /// gamma - mean_{B_1 \ B_r} u0, r > R
  double outer_u_margin = 0.0;
  /// mean_{B_r} w0 - mean_{B_1} w0 - Gamma_w, r < R
  double inner_w_margin = 0.0;
  /// mean_{B_1} w0 - eta - mean_{B_1 \ B_r} w0, r > R
  double outer_w_margin = 0.0;
  /// Largest face radius up to which mean_{B_r} u0 >= Gamma_u holds literally.
  double literal_inner_radius = 0.0;
  bool ok() const {
    return inner_u_margin >= 0.0 && outer_u_margin >= 0.0 && inner_w_margin >= 0.0 && outer_w_margin >= 0.0;
  }
};

DataConditionReport check_grow_up_conditions(const GrowUpConstants& c, const RadialProfile& u0,
                                                const RadialProfile& w0, double eta);

/// Two-zone r-grid that resolves the concentration radius of the data below:
/// about 32 cells across it out to 1.2 R, then spacing 1/n_outer.
GridPtr grow_up_grid(const GrowUpConstants& c, std::size_t n_outer);

/// u0: smoothed indicator of radius rho with peak 1.1 Gamma_u and mass exactly m;
/// w0: M times a smoothed indicator of B_R plus a unit base, M sized for a 10%
/// margin in the inner w condition. Throws ConstructionError when the grid
/// cannot resolve rho or any condition fails.
InitialData build_grow_up_data(const GrowUpConstants& c, const ModelParams& p, const GridPtr& grid,
                                  double eta);

// ------------------------------------------------------- subcritical bound

/// Largest b in (0,1) (found by bisection, verified at every node) with
///   phi(xi) <= m/(2 pi) (b + 1 + eps) xi / (b + xi).
double mass_ratio_bound(std::span<const double> phi, const XiGrid& xig, double m, double eps);

struct SupersolutionBound {
  double eps = 0.0;
  double t0 = 0.0;
  double b = 0.0;
  double a = 0.0;
  double C = 0.0;
};

/// eps = half the admissible range of 8 > m(1+eps)/(pi delta); t0 the first
/// recorded time with 8 >= m(1+eps)/(pi delta) + 4 c1 e^{-delta t0/tau},
/// c1 = |w0|_inf / 2; b from mass_ratio_bound on max_{t <= t0} U. Requires m < 8 pi delta.
SupersolutionBound supersolution_bound(const ModelParams& p, double w0_supnorm, std::span<const double> times,
                                       const std::vector<std::vector<double>>& U_hist, const XiGrid& xig);

/// P[a xi/(b+xi)] with the stationary profile's memory integral in closed form.
double supersolution_parab(const SupersolutionBound& bound, const OperatorContext& ctx, double xi, double t);

// ------------------------------------------------------------ certificates

struct BarrierReport {
  enum class Region { inner, outer, super };
  Region region = Region::inner;
  double max_residual = 0.0;
  std::vector<std::pair<double, double>> violating_points;
  bool passed = false;
  double slack = 1e-12;
  std::size_t sample_count = 0;
  struct Sample {
    double xi, t, residual;
  };
  std::vector<Sample> samples;
};

/// Log-spaced xi in [xi_lo, xi_hi] (n points, endpoints inclusive).
std::vector<double> log_samples(double lo, double hi, std::size_t n);
/// Uniform samples in [lo, hi], endpoints inclusive.
std::vector<double> linear_samples(double lo, double hi, std::size_t n);

/// Evaluates the region's residual on xs x ts. For Region::super the residual
/// is -P[Obar] (a supersolution needs P >= 0), so `passed` has the same meaning.
BarrierReport certify_barrier(BarrierReport::Region region, const SubsolutionSpec& spec,
                              const OperatorContext& ctx, std::span<const double> xs, std::span<const double> ts,
                              double slack = 1e-12);
BarrierReport certify_supersolution(const SupersolutionBound& bound, const OperatorContext& ctx,
                                    std::span<const double> xs, std::span<const double> ts, double slack = 1e-12);

void write_barrier_report(std::ostream& text, const BarrierReport& r);
void write_barrier_csv(std::ostream& csv, const BarrierReport& r);

// -------------------------------------------------------------- ordering

/// U snapshots at common times on one grid.
struct UHistory {
  std::vector<double> times;
  std::vector<std::vector<double>> U;
};

struct OrderingReport {
  double max_violation = 0.0;  ///< max over (xi,t) of lower - upper
  double at_xi = 0.0;
  double at_t = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Checks lower <= upper + 1e-8 m at every recorded (xi, t).
OrderingReport compare_trajectories(const UHistory& lower, const UHistory& upper, const XiGrid& xig, double m);

/// Samples the barrier on the grid at the given times.
UHistory barrier_history(const SubsolutionSpec& spec, const XiGrid& xig, std::span<const double> times);

}  // namespace chemomass
