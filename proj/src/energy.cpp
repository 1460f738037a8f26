#include "chemomass/energy.hpp"

#include <cmath>

#include "chemomass/errors.hpp"

namespace chemomass {

double energy_functional(const PrimalState& s, const ModelParams& p, double pexp) {
  const auto A = s.u.grid().areas();
  double iu = 0.0, iw = 0.0;
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    iu += A[i] * std::pow(s.u[i], pexp);
    iw += A[i] * std::pow(s.w[i], pexp + 1.0);
  }
  return iu / pexp + p.tau / (pexp + 1.0) * iw;
}

EnergyTerms energy_monitor(const PrimalState& prev, const PrimalState& now, const ModelParams& p,
                           double pexp) {
  if (!(pexp > 1.0)) throw InvalidInput("energy_monitor: p must exceed 1");
  if (!(now.t > prev.t)) throw InvalidInput("energy_monitor: states must be consecutive in time");
  const auto& g = now.u.grid();
  const auto r = g.faces();
  const auto c = g.centers();
  const auto A = g.areas();
  const std::size_t n = g.size();

  EnergyTerms e;
  e.time_derivative = (energy_functional(now, p, pexp) - energy_functional(prev, p, pexp)) / (now.t - prev.t);

  // int |grad u^{p/2}|^2 = 2 pi int r (d_r u^{p/2})^2 dr, face differences
  double grad = 0.0;
  for (std::size_t f = 1; f < n; ++f) {
    const double h = c[f] - c[f - 1];
    const double d = (std::pow(now.u[f], 0.5 * pexp) - std::pow(now.u[f - 1], 0.5 * pexp)) / h;
    grad += 2.0 * kPi * r[f] * d * d * h;
  }
  e.dissipation = 4.0 * (pexp - 1.0) / (pexp * pexp) * grad;

  double iw = 0.0, upw = 0.0, uwp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    iw += A[i] * std::pow(now.w[i], pexp + 1.0);
    upw += A[i] * std::pow(now.u[i], pexp) * now.w[i];
    uwp += A[i] * now.u[i] * std::pow(now.w[i], pexp);
  }
  e.decay = p.delta * iw;
  e.lhs = e.time_derivative + e.dissipation + e.decay;
  e.rhs = (pexp - 1.0) / pexp * upw + uwp;
  return e;
}

}  // namespace chemomass
