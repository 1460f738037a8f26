#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "chemomass/errors.hpp"

namespace chemomass::detail {

// Thomas algorithm for lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i].
// lower[0] and upper[n-1] are ignored. The systems assembled by the solvers are
// M-matrices (diagonally dominant), so no pivoting is needed.
inline void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                              std::span<const double> upper, std::span<double> rhs) {
  const std::size_t n = diag.size();
  if (n == 0) return;
  std::vector<double> c(n);
  double piv = diag[0];
  if (piv == 0.0 || !std::isfinite(piv)) throw NumericalError("tridiagonal solve: singular pivot at row 0");
  c[0] = upper[0] / piv;
  rhs[0] /= piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = diag[i] - lower[i] * c[i - 1];
    if (piv == 0.0 || !std::isfinite(piv)) throw NumericalError("tridiagonal solve: singular pivot");
    c[i] = (i + 1 < n) ? upper[i] / piv : 0.0;
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / piv;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

}  // namespace chemomass::detail
