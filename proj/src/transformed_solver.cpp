#include "chemomass/transformed_solver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <sstream>

#include "chemomass/errors.hpp"
#include "chemomass/tridiagonal.hpp"

namespace chemomass {

OperatorContext make_context(const ModelParams& p, const RadialProfile& w0, const XiGrid& xig) {
  auto W = std::make_shared<const MassFunction>(w0);
  if (w0.min() < 0.0) throw InvalidInput("make_context: w0 must be nonnegative");
  OperatorContext ctx;
  ctx.p = p;
  ctx.W0 = W->sample(xig);
  ctx.kappa0 = W->total();
  ctx.W0_at = [W](double xi) { return (*W)(xi); };
  return ctx;
}

OperatorContext make_context(const ModelParams& p, std::function<double(double)> W0, const XiGrid& xig) {
  if (!W0) throw InvalidInput("make_context: empty W0 function");
  OperatorContext ctx;
  ctx.p = p;
  ctx.W0.resize(xig.size());
  for (std::size_t j = 0; j < xig.size(); ++j) ctx.W0[j] = W0(xig[j]);
  ctx.W0.front() = 0.0;
  ctx.kappa0 = ctx.W0.back();
  ctx.W0_at = std::move(W0);
  return ctx;
}

double parab_point(double xi, double Ut, double U_xi, double U_xixi, double I, const OperatorContext& ctx,
                   double t) {
  const auto& p = ctx.p;
  const double forcing = 2.0 * (ctx.W0_eval(xi) - ctx.kappa0 * xi) * std::exp(-p.kernel_rate() * t);
  return Ut - 4.0 * xi * U_xixi - (2.0 / p.tau) * I * U_xi - forcing * U_xi;
}

std::vector<double> parab_residual(const XiGrid& xig, std::span<const double> U, std::span<const double> Ut,
                                   std::span<const double> I, const OperatorContext& ctx, double t) {
  const std::size_t N = xig.size();
  if (U.size() != N || Ut.size() != N || I.size() != N) throw InvalidInput("parab_residual: size mismatch");
  std::vector<double> res(N, 0.0);
  for (std::size_t j = 1; j + 1 < N; ++j) {
    const double hm = xig.spacing(j - 1), hp = xig.spacing(j);
    const double dp = U[j + 1] - U[j], dm = U[j] - U[j - 1];
    const double denom = hm * hp * (hm + hp);
    const double U_xi = (hm * hm * dp + hp * hp * dm) / denom;
    const double U_xixi = 2.0 * (hm * dp - hp * dm) / denom;
    res[j] = parab_point(xig[j], Ut[j], U_xi, U_xixi, I[j], ctx, t);
  }
  return res;
}

std::vector<double> drift_velocity(const XiGrid& xig, std::span<const double> I, const OperatorContext& ctx,
                                   double t) {
  const auto& p = ctx.p;
  const double e = std::exp(-p.kernel_rate() * t);
  std::vector<double> c(xig.size());
  for (std::size_t j = 0; j < c.size(); ++j)
    c[j] = (2.0 / p.tau) * I[j] + 2.0 * (ctx.W0[j] - ctx.kappa0 * xig[j]) * e;
  return c;
}

MassState make_mass_state(std::vector<double> U0, const XiGrid& xig, const OperatorContext& ctx) {
  if (U0.size() != xig.size()) throw InvalidInput("make_mass_state: U0 does not match the grid");
  if (ctx.W0.size() != xig.size()) throw InvalidInput("make_mass_state: context built for another grid");
  const double top = ctx.p.m / (2.0 * kPi);
  if (std::abs(U0.front()) > 1e-9 * top) throw InvalidInput("make_mass_state: U0(0) must vanish");
  if (std::abs(U0.back() - top) > 1e-9 * top) {
    std::ostringstream os;
    os << "make_mass_state: U0(1) = " << U0.back() << " but m/2pi = " << top;
    throw InvalidInput(os.str());
  }
  for (std::size_t j = 0; j + 1 < U0.size(); ++j)
    if (U0[j + 1] < U0[j] - 1e-12 * top) throw InvalidInput("make_mass_state: U0 must be nondecreasing");
  U0.front() = 0.0;
  U0.back() = top;
  MassState s;
  s.U = std::move(U0);
  s.I.assign(s.U.size(), 0.0);
  return s;
}

double transformed_dt_cap(const ModelParams& p) { return 0.1 * p.tau / std::max(p.delta, 1.0); }

MassState step_transformed(const MassState& s, const XiGrid& xig, const OperatorContext& ctx, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("step_transformed: dt must be > 0");
  const std::size_t N = xig.size();
  const auto& p = ctx.p;
  const double top = p.m / (2.0 * kPi);
  const auto c = drift_velocity(xig, s.I, ctx, s.t);

  // interior unknowns j = 1..N-2
  const std::size_t n = N - 2;
  std::vector<double> lower(n), diag(n), upper(n), rhs(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = k + 1;
    const double hm = xig.spacing(j - 1), hp = xig.spacing(j);
    const double a = 8.0 * xig[j] / (hm + hp);
    double lo = a / hm, up = a / hp;
    // U_t = c U_xi: information travels toward the origin when c > 0
    if (c[j] > 0.0) up += c[j] / hp;
    else if (c[j] < 0.0) lo += -c[j] / hm;
    lower[k] = -dt * lo;
    upper[k] = -dt * up;
    diag[k] = 1.0 + dt * (lo + up);
    rhs[k] = s.U[j];
  }
  // Dirichlet pins: U_0 = 0 contributes nothing, U_{N-1} = top
  rhs[n - 1] -= upper[n - 1] * top;
  detail::solve_tridiagonal(lower, diag, upper, rhs);

  MassState out;
  out.t = s.t + dt;
  out.U.resize(N);
  out.U.front() = 0.0;
  out.U.back() = top;
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(rhs[k])) {
      std::ostringstream os;
      os << "step_transformed: non-finite U at t = " << out.t;
      throw NumericalError(os.str());
    }
    out.U[k + 1] = rhs[k];
  }

  const double decay = std::exp(-p.kernel_rate() * dt);
  const auto hw = hold_weights(p.kernel_rate(), dt);
  out.I.resize(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double g0 = s.U[j] - top * xig[j];
    const double g1 = out.U[j] - top * xig[j];
    out.I[j] = decay * s.I[j] + hw.old_w * g0 + hw.new_w * g1;
  }
  out.I.front() = 0.0;
  out.I.back() = 0.0;
  return out;
}

namespace {

TrajectoryRow transformed_row(const MassState& s, const XiGrid& xig, const OperatorContext& ctx) {
  const auto& p = ctx.p;
  const std::size_t N = xig.size();
  const double k = p.kernel_rate();
  const double e = std::exp(-k * s.t);
  const double E = memory_weight(k, s.t);
  const double top = p.m / (2.0 * kPi);

  TrajectoryRow row;
  row.t = s.t;
  row.U_slope_0 = s.U[1] / xig[1];
  row.u_at_0 = 2.0 * row.U_slope_0;
  double max_slope = 0.0, min_d = s.U[1] - s.U[0], max_w = 0.0, sup_ratio = 0.0, mem = 0.0;
  for (std::size_t j = 0; j + 1 < N; ++j) {
    const double h = xig.spacing(j);
    const double d = s.U[j + 1] - s.U[j];
    max_slope = std::max(max_slope, d / h);
    min_d = std::min(min_d, d);
    // w(sqrt xi) = 2 W_xi,  W = W0 e^{-kt} + (I + top xi E) / tau
    const double dW = (ctx.W0[j + 1] - ctx.W0[j]) * e + (s.I[j + 1] - s.I[j] + top * h * E) / p.tau;
    max_w = std::max(max_w, 2.0 * dW / h);
  }
  for (std::size_t j = 1; j < N; ++j) {
    sup_ratio = std::max(sup_ratio, s.U[j] / xig[j]);
    mem = std::max(mem, std::abs(s.I[j]));
  }
  row.sup_u = 2.0 * max_slope;
  row.sup_w = max_w;
  row.mass_u = 2.0 * kPi * s.U.back();
  row.mass_w = 2.0 * kPi * ctx.kappa0 * e + p.m / p.tau * E;
  row.sup_U_over_xi = sup_ratio;
  row.min_dU = min_d;
  row.memory_norm = mem;
  return row;
}

}  // namespace

TrajectoryRecord run_transformed(std::vector<double> U0, const XiGrid& xig, const OperatorContext& ctx,
                                 const PrimalConfig& cfg, const MassObserver& observer) {
  cfg.validate();
  const double threshold = cfg.blowup_threshold > 0.0 ? cfg.blowup_threshold : 1e6 * ctx.p.m / kPi;
  const double dt_max = std::min(cfg.dt, transformed_dt_cap(ctx.p));
  double dt_try = cfg.dt_start > 0.0 ? std::min(cfg.dt_start, dt_max) : dt_max;

  TrajectoryRecord rec;
  rec.source = TrajectoryRecord::Source::transformed;
  MassState s = make_mass_state(std::move(U0), xig, ctx);
  rec.rows.push_back(transformed_row(s, xig, ctx));
  if (observer) observer(s);

  const auto n_records = static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.record_every - 1e-9));
  std::size_t steps = 0;
  for (std::size_t r = 1; r <= n_records; ++r) {
    const double t_next = std::min(cfg.t_end, static_cast<double>(r) * cfg.record_every);
    while (s.t < t_next) {
      const double remaining = t_next - s.t;
      // equal substeps of at most dt_try that land exactly on t_next
      const double nsub = std::max(1.0, std::ceil(remaining / dt_try - 1e-9));
      const double dt = remaining / nsub;
      s = step_transformed(s, xig, ctx, dt);
      ++steps;
      if (nsub <= 1.0) s.t = t_next;
      dt_try = std::min(dt_max, dt_try * 1.1);
    }
    TrajectoryRow row = transformed_row(s, xig, ctx);
    rec.rows.push_back(row);
    if (observer) observer(s);
    if (row.sup_u > threshold) {
      rec.blew_up = true;
      break;
    }
  }
  rec.steps = steps;
  return rec;
}

double memory_exact(std::span<const double> times, std::span<const double> U_hist, double xi,
                    const OperatorContext& ctx, double t) {
  if (times.size() != U_hist.size() || times.size() < 2)
    throw InvalidInput("memory_exact: need at least two matching samples");
  if (times.front() != 0.0 || std::abs(times.back() - t) > 1e-12 * std::max(1.0, t))
    throw InvalidInput("memory_exact: samples must cover [0, t]");
  const double k = ctx.p.kernel_rate();
  const double lin = ctx.p.m / (2.0 * kPi) * xi;
  auto f = [&](std::size_t i) { return std::exp(-k * (t - times[i])) * (U_hist[i] - lin); };

  double sum = 0.0;
  std::size_t i = 0;
  const std::size_t last = times.size() - 1;
  // nonuniform Simpson over pairs of intervals, trapezoid for a leftover one
  for (; i + 2 <= last; i += 2) {
    const double h0 = times[i + 1] - times[i], h1 = times[i + 2] - times[i + 1];
    const double H = h0 + h1;
    sum += H / 6.0 *
           ((2.0 - h1 / h0) * f(i) + H * H / (h0 * h1) * f(i + 1) + (2.0 - h0 / h1) * f(i + 2));
  }
  if (i < last) sum += 0.5 * (times[last] - times[i]) * (f(i) + f(last));
  return sum;
}

void write_mass_state_csv(std::ostream& os, const XiGrid& xig, const MassState& s) {
  if (s.U.size() != xig.size() || s.I.size() != xig.size()) throw InvalidInput("write_mass_state_csv: size mismatch");
  const auto old = os.precision(17);
  os << "xi,U,I\n";
  for (std::size_t j = 0; j < xig.size(); ++j) os << xig[j] << ',' << s.U[j] << ',' << s.I[j] << '\n';
  os.precision(old);
}

}  // namespace chemomass
