#pragma once

// Scalar nonlocal equation for the cumulative mass U(xi,t) = int_0^{sqrt xi} r u dr:
//
//   P[U] := U_t - 4 xi U_xixi - (2/tau) I U_xi - 2 (W0(xi) - kappa0 xi) e^{-delta t/tau} U_xi = 0,
//   I(xi,t) = int_0^t e^{-delta (t-s)/tau} (U(xi,s) - m xi / 2 pi) ds,
//
// with U(0,t) = 0 and U(1,t) = m / 2 pi. The memory I is carried as a local
// field obeying I_t = -(delta/tau) I + (U - m xi / 2 pi).

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "chemomass/radial_core.hpp"
#include "chemomass/trajectory.hpp"

namespace chemomass {

struct MassState {
  double t = 0.0;
  std::vector<double> U;
  std::vector<double> I;
};

/// Everything in P that does not depend on U: parameters and the moments of w0.
struct OperatorContext {
  ModelParams p;
  std::vector<double> W0;              ///< W0 on the solver's XiGrid
  double kappa0 = 0.0;                 ///< W0(1)
  std::function<double(double)> W0_at; ///< W0 at arbitrary xi in [0,1]

  double W0_eval(double xi) const { return W0_at(xi); }
};

/// Context from a w0 profile (exact piecewise-linear W0).
OperatorContext make_context(const ModelParams& p, const RadialProfile& w0, const XiGrid& xig);
/// Context from an arbitrary W0 function with W0(0) = 0.
OperatorContext make_context(const ModelParams& p, std::function<double(double)> W0, const XiGrid& xig);

/// Pointwise P with all derivatives supplied.
double parab_point(double xi, double Ut, double U_xi, double U_xixi, double I, const OperatorContext& ctx,
                   double t);

/// P[U] at every node; U_xi and U_xixi by second-order central differences on
/// the (possibly nonuniform) grid. Pinned end nodes return 0.
std::vector<double> parab_residual(const XiGrid& xig, std::span<const double> U, std::span<const double> Ut,
                                   std::span<const double> I, const OperatorContext& ctx, double t);

/// Velocity multiplying U_xi: (2/tau) I + 2 (W0 - kappa0 xi) e^{-delta t/tau}.
std::vector<double> drift_velocity(const XiGrid& xig, std::span<const double> I, const OperatorContext& ctx,
                                   double t);

/// Initial state: U0 pinned exactly, I = 0. Rejects U0 that is not
/// nondecreasing or whose end values miss 0 and m/2pi by more than 1e-9 relative.
MassState make_mass_state(std::vector<double> U0, const XiGrid& xig, const OperatorContext& ctx);

/// One step. U is advanced with the drift frozen at t^n, diffusion and
/// upwind drift both implicit (an M-matrix, so ordering and monotonicity are
/// preserved); I then follows by the exponential integrator with the source
/// interpolated linearly between U^n and U^{n+1}.
MassState step_transformed(const MassState& s, const XiGrid& xig, const OperatorContext& ctx, double dt);

/// Step size cap 0.1 tau / max(delta, 1) for the memory integrator.
double transformed_dt_cap(const ModelParams& p);

using MassObserver = std::function<void(const MassState&)>;

/// Loops step_transformed, recording every cfg.record_every. u_at_0 = 2 U(xi_1)/xi_1,
/// sup_u = 2 max DU/Dxi, plus sup U/xi, min DU and max |I|.
TrajectoryRecord run_transformed(std::vector<double> U0, const XiGrid& xig, const OperatorContext& ctx,
                                 const PrimalConfig& cfg, const MassObserver& observer = {});

/// Direct quadrature of int_0^t e^{-delta (t-s)/tau} (U(xi,s) - m xi/2pi) ds from
/// samples (times[k], U_hist[k]) at one xi, using piecewise quadratics (Simpson).
/// The samples must start at 0 and end at t.
double memory_exact(std::span<const double> times, std::span<const double> U_hist, double xi,
                    const OperatorContext& ctx, double t);

/// Snapshot CSV with header "xi,U,I", 17 significant digits.
void write_mass_state_csv(std::ostream& os, const XiGrid& xig, const MassState& s);

}  // namespace chemomass
