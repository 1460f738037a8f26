#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace chemomass {

/// Time stepping controls shared by both solvers.
struct PrimalConfig {
  double dt = 1e-3;
  double t_end = 10.0;
  /// Diagnostics are recorded every `record_every` time units; steps are
  /// adjusted so that records land exactly on multiples of it.
  double record_every = 0.1;
  /// sup u above this ends the run with `blew_up` set. <= 0 selects 1e6 m/pi.
  double blowup_threshold = 0.0;
  /// First step size for the transformed solver; later steps grow by 10%
  /// until they reach dt. <= 0 means start at dt.
  double dt_start = 0.0;

  void validate() const;
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TrajectoryRow {
  double t = 0.0;
  double sup_u = kNaN;
  double sup_w = kNaN;
  double mass_u = kNaN;
  double mass_w = kNaN;
  double u_at_0 = kNaN;
  double U_slope_0 = kNaN;
  double energy_lhs = kNaN;
  double energy_rhs = kNaN;
  // transformed solver only
  double sup_U_over_xi = kNaN;
  double min_dU = kNaN;
  double memory_norm = kNaN;
};

struct TrajectoryRecord {
  enum class Source { primal, transformed };
  Source source = Source::primal;
  std::vector<TrajectoryRow> rows;
  bool blew_up = false;
  std::size_t steps = 0;

  std::vector<double> column(double TrajectoryRow::*field) const;
  double t_end() const { return rows.empty() ? 0.0 : rows.back().t; }
};

/// Columns t,sup_u,sup_w,mass_u,mass_w,u_at_0,U_slope_0,energy_lhs,energy_rhs;
/// transformed records append sup_U_over_xi,min_dU,memory_norm.
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& rec);

}  // namespace chemomass
