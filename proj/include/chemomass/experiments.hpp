#pragma once

// Studies built on the solvers: mass sweeps across 8 pi delta, trajectory
// classification, exponential growth-rate fits and energy-inequality checks.

#include <cstddef>
#include <iosfwd>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "chemomass/comparison.hpp"
#include "chemomass/radial_core.hpp"
#include "chemomass/trajectory.hpp"
#include "chemomass/transformed_solver.hpp"

namespace chemomass {

enum class Verdict { bounded, growing, undecided };
const char* to_string(Verdict v);

struct GrowthFit {
  double alpha_hat = 0.0;  ///< least-squares slope of log y
  double intercept = 0.0;  ///< log y at t = 0 on the fitted line
  double r2 = 0.0;
  std::size_t samples = 0;
};

/// Least-squares fit of log y against t over the trailing window
/// [t_last - window, t_last]. Throws InvalidInput on nonpositive samples or
/// fewer than three points in the window.
GrowthFit growth_rate_fit(std::span<const double> t, std::span<const double> y, double window);

struct Classification {
  Verdict verdict = Verdict::undecided;
  std::optional<double> growth_rate;
  double r2 = 0.0;
  /// (max - min) / max of sup_u over the last two windows
  double spread = 0.0;
  /// |log-slope of sup_u| times the length of the last two windows
  double trend = 0.0;
  std::string evidence;
};

/// Growing when the log-slope of u(0,t) over the last window exceeds 0.01 with
/// R^2 > 0.99; Bounded when sup u varies by less than 1% over the last two
/// windows without a trend; Undecided otherwise. Needs three windows of data.
Classification boundedness_classifier(const TrajectoryRecord& traj, double window);

/// Fraction of recorded rows (t > 0) with energy_lhs <= energy_rhs + rel_tol |energy_rhs|.
double energy_pass_fraction(const TrajectoryRecord& traj, double rel_tol);

// ------------------------------------------------------------ data families

/// Smoothed indicator of B_{radius} normalized to mass m (u0), and w0 = w_ratio u0.
InitialData concentrated_data(const GridPtr& grid, double m, double radius = 0.3, double w_ratio = 0.5);
/// u0 = m/pi, w0 = m/(pi delta) (m/pi when delta = 0): an exact equilibrium for delta > 0.
InitialData homogeneous_data(const GridPtr& grid, const ModelParams& p);

// -------------------------------------------------------------------- sweeps

enum class DataFamily { homogeneous, concentrated };

struct SweepConfig {
  std::vector<double> masses;
  ModelParams p;  ///< delta and tau; m is taken from `masses`
  /// Above the critical mass the concentrated family is built to satisfy the
  /// grow-up hypotheses; below it the smoothed indicator of B_0.3 is used.
  DataFamily family = DataFamily::concentrated;
  double horizon = 200.0;
  double dt = 0.05;
  double record_every = 0.5;
  double window = 50.0;
  double eta = 1.0;
  std::size_t n = 512;        ///< r-cells for subcritical data
  std::size_t n_data = 1024;  ///< outer r-cells of the grow-up data grid (see grow_up_grid)
  std::size_t nxi = 512;
  /// Smallest positive node of the graded xi-grid used above the critical mass.
  double xi_min = 1e-200;
  double xi_ratio = 1.05;
  unsigned threads = 0;  ///< 0: hardware concurrency
  void validate() const;
};

struct SweepRow {
  double m = 0.0;
  double m_over_critical = 0.0;  ///< infinite when delta = 0
  Verdict verdict = Verdict::undecided;
  double alpha_hat = kNaN;
  double r2 = kNaN;
  double sup_u_final = kNaN;
  double runtime_s = 0.0;
  bool resolution_warning = false;  ///< Bounded above a Growing mass
  std::string error;                ///< non-empty when the run failed
};

/// Data, grid and stepping controls of one sweep row. Above the critical mass
/// the data come from build_grow_up_data on grow_up_grid(n_data) and the
/// xi-grid is graded; otherwise the smoothed indicator of B_0.3 on uniform grids.
struct RowSetup {
  ModelParams p;
  InitialData data;
  XiGrid xig;
  PrimalConfig pc;
  std::optional<GrowUpConstants> constants;
};
RowSetup setup_sweep_row(const SweepConfig& cfg, double m);

/// Transformed-solver run of one sweep row (also used by the CLI and tests).
struct RowRun {
  TrajectoryRecord record;
  Classification classification;
  std::optional<GrowUpConstants> constants;
};
RowRun run_sweep_row(const SweepConfig& cfg, double m, const MassObserver& observer = {});

/// Runs every mass in parallel; rows come back in mass order. Per-row errors
/// are captured in SweepRow::error and the sweep continues.
std::vector<SweepRow> mass_sweep(const SweepConfig& cfg);

/// Columns m,m_over_critical,verdict,alpha_hat,r2,sup_u_final,runtime_s.
/// With timing off runtime_s is written as 0 so the table is reproducible.
void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows, bool timing = true);

/// Default graded grid for runs that concentrate at the origin.
XiGrid concentration_grid(double xi_min, double ratio, std::size_t nxi);

// ------------------------------------------------------- ordering of pairs

/// Positive density on `grid` with mass m: a floor plus two Gaussian bumps of
/// random height, centre and width.
RadialProfile random_density(std::mt19937_64& rng, const GridPtr& grid, double m);

struct PairOrderingReport {
  std::size_t pairs = 0;
  std::size_t failed = 0;
  OrderingReport worst;  ///< the pair with the largest violation
};

/// Draws `pairs` random (w0, U_a, U_b), orders the two mass functions
/// pointwise (min and max), evolves both with the same coefficients and checks
/// lower <= upper + 1e-8 m at every recorded time.
PairOrderingReport random_pair_ordering(const ModelParams& p, std::size_t pairs, std::uint64_t seed,
                                        std::size_t n, const PrimalConfig& cfg);

}  // namespace chemomass
