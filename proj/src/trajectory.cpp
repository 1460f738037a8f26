#include "chemomass/trajectory.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "chemomass/errors.hpp"

namespace chemomass {

void PrimalConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("config: dt must be > 0");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidInput("config: t_end must be > 0");
  if (!(record_every > 0.0)) throw InvalidInput("config: record_every must be > 0");
  if (std::isnan(blowup_threshold)) throw InvalidInput("config: blowup_threshold is NaN");
}

std::vector<double> TrajectoryRecord::column(double TrajectoryRow::*field) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.*field);
  return out;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& rec) {
  const bool extra = rec.source == TrajectoryRecord::Source::transformed;
  os << "t,sup_u,sup_w,mass_u,mass_w,u_at_0,U_slope_0,energy_lhs,energy_rhs";
  if (extra) os << ",sup_U_over_xi,min_dU,memory_norm";
  os << '\n' << std::setprecision(17);
  for (const auto& r : rec.rows) {
    os << r.t << ',' << r.sup_u << ',' << r.sup_w << ',' << r.mass_u << ',' << r.mass_w << ','
       << r.u_at_0 << ',' << r.U_slope_0 << ',' << r.energy_lhs << ',' << r.energy_rhs;
    if (extra) os << ',' << r.sup_U_over_xi << ',' << r.min_dU << ',' << r.memory_norm;
    os << '\n';
  }
}

}  // namespace chemomass
