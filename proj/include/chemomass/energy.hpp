#pragma once

#include "chemomass/primal_solver.hpp"

namespace chemomass {

/// The two sides of the L^p energy inequality
///   d/dt { 1/p int u^p + tau/(p+1) int w^{p+1} } + 4(p-1)/p^2 int |grad u^{p/2}|^2
///     + delta int w^{p+1}  <=  (p-1)/p int u^p w + int u w^p,
/// the time derivative taken by differencing two consecutive states.
struct EnergyTerms {
  double time_derivative = 0.0;
  double dissipation = 0.0;  ///< 4(p-1)/p^2 int |grad u^{p/2}|^2
  double decay = 0.0;        ///< delta int w^{p+1}
  double lhs = 0.0;
  double rhs = 0.0;
};

/// The functional 1/p int u^p + tau/(p+1) int w^{p+1}.
double energy_functional(const PrimalState& s, const ModelParams& p, double pexp);

/// Terms evaluated at `now`, time derivative from (prev, now). Requires pexp > 1
/// and now.t > prev.t.
EnergyTerms energy_monitor(const PrimalState& prev, const PrimalState& now, const ModelParams& p,
                           double pexp);

}  // namespace chemomass
