#pragma once

// Radially symmetric time integration of
//   u_t = Lap u - div(u grad v),  0 = Lap v - mu(t) + w,  tau w_t + delta w = u
// in the unit disk with no-flux boundaries. u is advanced by an IMEX
// finite-volume step, v is recovered from the exact cumulative integral of w,
// and w by an exponential integrator.

#include <functional>
#include <vector>

#include "chemomass/radial_core.hpp"
#include "chemomass/trajectory.hpp"

namespace chemomass {

struct PrimalState {
  double t = 0.0;
  RadialProfile u;
  RadialProfile w;
  RadialProfile v;          ///< zero-mean representative
  std::vector<double> vr;   ///< v_r at the n+1 cell faces
};

struct VField {
  RadialProfile v;
  std::vector<double> vr;
};

/// Solves Lap v = mu - w with v_r(0) = v_r(1) = 0 via
///   r v_r(r) = mu r^2 / 2 - int_0^r rho w drho,
/// integrated exactly for piecewise-constant w. Throws CompatibilityError when
/// mu differs from mean(w) by more than 1e-8 relative.
VField solve_v(const RadialProfile& w, double mu);

/// w+ = e^{-k dt} w + (1/tau) int_0^dt e^{-k (dt-s)} u(s) ds, k = delta/tau, with u
/// linear between u_old and u_new. Exact for sources constant in time, so the
/// homogeneous equilibrium u = delta w is a fixed point for every dt.
RadialProfile step_w(const RadialProfile& w, const RadialProfile& u_old, const RadialProfile& u_new,
                     const ModelParams& p, double dt);

/// Largest dt for which the explicit upwind flux keeps u >= 0: 0.5 h / max|v_r|.
double max_stable_dt(const PrimalState& s);

/// One IMEX step for u: implicit diffusion, explicit upwind chemotactic flux.
/// Conservative: the disk integral of u is unchanged up to rounding.
RadialProfile step_u(const PrimalState& s, const ModelParams& p, double dt);

/// Assembles a consistent state (v solved from w at time t).
PrimalState make_primal_state(RadialProfile u, RadialProfile w, double t = 0.0);

/// Advances one full step: u, then w, then v.
PrimalState advance_primal(const PrimalState& s, const ModelParams& p, double dt);

using PrimalObserver = std::function<void(const PrimalState&)>;

/// Runs solve_v -> step_u -> step_w until cfg.t_end or until sup u exceeds the
/// blow-up threshold. Steps larger than max_stable_dt are split. The observer
/// sees the initial state and every recorded state. Energy columns use p = energy_p.
TrajectoryRecord run_primal(const RadialProfile& u0, const RadialProfile& w0, const ModelParams& p,
                            const PrimalConfig& cfg, const PrimalObserver& observer = {},
                            double energy_p = 2.0);

}  // namespace chemomass
