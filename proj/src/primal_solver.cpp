#include "chemomass/primal_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chemomass/energy.hpp"
#include "chemomass/errors.hpp"
#include "chemomass/tridiagonal.hpp"

namespace chemomass {

VField solve_v(const RadialProfile& w, double mu) {
  const auto& g = w.grid();
  const auto r = g.faces();
  const auto c = g.centers();
  const std::size_t n = g.size();

  const double mean_w = integrate_disk(w) / kPi;
  const double scale = std::max({std::abs(mean_w), std::abs(mu), 1e-300});
  if (std::abs(mu - mean_w) > 1e-8 * scale) {
    std::ostringstream os;
    os << "solve_v: mu = " << mu << " but mean(w) = " << mean_w;
    throw CompatibilityError(os.str());
  }

  // W_f = int_0^{r_f} rho w drho
  std::vector<double> W(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) W[i + 1] = W[i] + 0.5 * w[i] * (r[i + 1] - r[i]) * (r[i + 1] + r[i]);

  std::vector<double> vr(n + 1, 0.0);
  for (std::size_t f = 1; f < n; ++f) vr[f] = 0.5 * mu * r[f] - W[f] / r[f];

  // Inside cell i, v_r = (mu - w_i) r/2 - C_i / r with C_i = W_i - w_i r_i^2 / 2,
  // so v has the antiderivative (mu - w_i) r^2/4 - C_i ln r.
  auto cell_integral = [&](std::size_t i, double a, double b) {
    const double Ci = W[i] - 0.5 * w[i] * r[i] * r[i];
    double val = 0.25 * (mu - w[i]) * (b - a) * (b + a);
    if (i > 0) val -= Ci * std::log(b / a);
    return val;
  };
  std::vector<double> G(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) G[i + 1] = G[i] + cell_integral(i, r[i], r[i + 1]);

  std::vector<double> v(n);
  const auto areas = g.areas();
  double mean_v = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = G[i] + cell_integral(i, std::max(r[i], 0.0), c[i]) - G[n];
    mean_v += areas[i] * v[i];
  }
  mean_v /= kPi;
  for (auto& x : v) x -= mean_v;
  return {RadialProfile(w.grid_ptr(), std::move(v)), std::move(vr)};
}

RadialProfile step_w(const RadialProfile& w, const RadialProfile& u_old, const RadialProfile& u_new,
                     const ModelParams& p, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("step_w: dt must be > 0");
  const double decay = std::exp(-p.kernel_rate() * dt);
  const auto hw = hold_weights(p.kernel_rate(), dt);
  const double a = hw.old_w / p.tau, b = hw.new_w / p.tau;
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = decay * w[i] + a * u_old[i] + b * u_new[i];
  return RadialProfile(w.grid_ptr(), std::move(out));
}

double max_stable_dt(const PrimalState& s) {
  double vmax = 0.0;
  for (double x : s.vr) vmax = std::max(vmax, std::abs(x));
  if (vmax == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * s.u.grid().min_width() / vmax;
}

RadialProfile step_u(const PrimalState& s, const ModelParams& /*p*/, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("step_u: dt must be > 0");
  const auto& g = s.u.grid();
  const std::size_t n = g.size();
  const auto r = g.faces();
  const auto c = g.centers();
  const auto A = g.areas();
  if (s.vr.size() != n + 1) throw InvalidInput("step_u: v_r must have n+1 face values");

  // explicit upwind flux 2 pi r u v_r through interior faces
  std::vector<double> flux(n + 1, 0.0);
  for (std::size_t f = 1; f < n; ++f) {
    const double up = s.vr[f] > 0.0 ? s.u[f - 1] : s.u[f];
    flux[f] = 2.0 * kPi * r[f] * s.vr[f] * up;
  }

  std::vector<double> kappa(n + 1, 0.0);
  for (std::size_t f = 1; f < n; ++f) kappa[f] = dt * 2.0 * kPi * r[f] / (c[f] - c[f - 1]);

  std::vector<double> lower(n), diag(n), upper(n), rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    lower[i] = -kappa[i];
    upper[i] = -kappa[i + 1];
    diag[i] = A[i] + kappa[i] + kappa[i + 1];
    rhs[i] = A[i] * s.u[i] - dt * (flux[i + 1] - flux[i]);
  }
  detail::solve_tridiagonal(lower, diag, upper, rhs);
  return RadialProfile(s.u.grid_ptr(), std::move(rhs));
}

PrimalState make_primal_state(RadialProfile u, RadialProfile w, double t) {
  if (u.grid_ptr() != w.grid_ptr() && u.grid().faces().size() != w.grid().faces().size())
    throw InvalidInput("make_primal_state: u and w live on different grids");
  const double mu = integrate_disk(w) / kPi;
  auto vf = solve_v(w, mu);
  return PrimalState{t, std::move(u), std::move(w), std::move(vf.v), std::move(vf.vr)};
}

PrimalState advance_primal(const PrimalState& s, const ModelParams& p, double dt) {
  auto u_new = step_u(s, p, dt);
  auto w_new = step_w(s.w, s.u, u_new, p, dt);
  return make_primal_state(std::move(u_new), std::move(w_new), s.t + dt);
}

namespace {

TrajectoryRow primal_row(const PrimalState& s) {
  TrajectoryRow row;
  row.t = s.t;
  row.sup_u = s.u.max();
  row.sup_w = s.w.max();
  row.mass_u = integrate_disk(s.u);
  row.mass_w = integrate_disk(s.w);
  row.u_at_0 = s.u[0];
  // U(r_1^2) / r_1^2 for the piecewise-constant u
  row.U_slope_0 = 0.5 * s.u[0];
  return row;
}

void check_state(const PrimalState& s, std::size_t step) {
  double sup = 0.0, inf = 0.0;
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    const double x = s.u[i];
    if (!std::isfinite(x) || !std::isfinite(s.w[i])) {
      std::ostringstream os;
      os << "run_primal: non-finite value at step " << step << " (t = " << s.t << ")";
      throw NumericalError(os.str());
    }
    sup = std::max(sup, x);
    inf = std::min(inf, x);
  }
  if (inf < -1e-12 * sup) {
    std::ostringstream os;
    os << "run_primal: negative undershoot " << inf << " at step " << step << " (t = " << s.t << ")";
    throw NumericalError(os.str());
  }
}

}  // namespace

TrajectoryRecord run_primal(const RadialProfile& u0, const RadialProfile& w0, const ModelParams& p,
                            const PrimalConfig& cfg, const PrimalObserver& observer, double energy_p) {
  cfg.validate();
  if (u0.min() < 0.0 || w0.min() < 0.0) throw InvalidInput("run_primal: initial data must be nonnegative");
  const double threshold = cfg.blowup_threshold > 0.0 ? cfg.blowup_threshold : 1e6 * p.m / kPi;

  TrajectoryRecord rec;
  rec.source = TrajectoryRecord::Source::primal;
  PrimalState s = make_primal_state(u0, w0, 0.0);
  rec.rows.push_back(primal_row(s));
  if (observer) observer(s);

  const auto n_records = static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.record_every - 1e-9));
  std::size_t step = 0;
  for (std::size_t k = 1; k <= n_records; ++k) {
    const double t_next = std::min(cfg.t_end, static_cast<double>(k) * cfg.record_every);
    const double span = t_next - s.t;
    const auto nsub = static_cast<std::size_t>(std::max(1.0, std::ceil(span / cfg.dt - 1e-9)));
    const double dt = span / static_cast<double>(nsub);
    PrimalState prev = s;
    for (std::size_t j = 0; j < nsub; ++j) {
      // split further when the chemotactic flux would violate positivity
      const double stable = max_stable_dt(s);
      const auto split = static_cast<std::size_t>(std::max(1.0, std::ceil(dt / stable)));
      for (std::size_t q = 0; q < split; ++q) {
        prev = s;
        s = advance_primal(s, p, dt / static_cast<double>(split));
        ++step;
        check_state(s, step);
      }
      if (s.u.max() > threshold) break;
    }
    if (std::abs(s.t - t_next) <= 1e-9 * std::max(1.0, t_next)) s.t = t_next;
    TrajectoryRow row = primal_row(s);
    const auto e = energy_monitor(prev, s, p, energy_p);
    row.energy_lhs = e.lhs;
    row.energy_rhs = e.rhs;
    rec.rows.push_back(row);
    if (observer) observer(s);
    if (row.sup_u > threshold) {
      rec.blew_up = true;
      break;
    }
  }
  rec.steps = step;
  return rec;
}

}  // namespace chemomass
