#include "chemomass/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>
#include <thread>

#include "chemomass/errors.hpp"
#include "chemomass/transformed_solver.hpp"

namespace chemomass {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::bounded:
      return "Bounded";
    case Verdict::growing:
      return "Growing";
    case Verdict::undecided:
      return "Undecided";
  }
  return "Undecided";
}

GrowthFit growth_rate_fit(std::span<const double> t, std::span<const double> y, double window) {
  if (t.size() != y.size() || t.empty()) throw InvalidInput("growth_rate_fit: series sizes differ or are empty");
  if (!(window > 0.0)) throw InvalidInput("growth_rate_fit: window must be > 0");
  const double t_lo = t.back() - window * (1.0 + 1e-12);
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo) continue;
    if (!(y[i] > 0.0)) {
      std::ostringstream os;
      os << "growth_rate_fit: nonpositive sample " << y[i] << " at t = " << t[i];
      throw InvalidInput(os.str());
    }
    const double ly = std::log(y[i]);
    n += 1;
    sx += t[i];
    sy += ly;
    sxx += t[i] * t[i];
    sxy += t[i] * ly;
  }
  if (n < 3) throw InvalidInput("growth_rate_fit: fewer than three samples in the window");
  const double mx = sx / n, my = sy / n;
  double Sxx = 0, Sxy = 0, Syy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo) continue;
    const double dx = t[i] - mx, dy = std::log(y[i]) - my;
    Sxx += dx * dx;
    Sxy += dx * dy;
    Syy += dy * dy;
  }
  GrowthFit fit;
  fit.samples = static_cast<std::size_t>(n);
  fit.alpha_hat = Sxy / Sxx;
  fit.intercept = my - fit.alpha_hat * mx;
  const double ss_res = std::max(0.0, Syy - fit.alpha_hat * Sxy);
  fit.r2 = Syy > 0.0 ? 1.0 - ss_res / Syy : 1.0;
  return fit;
}

Classification boundedness_classifier(const TrajectoryRecord& traj, double window) {
  if (!(window > 0.0)) throw InvalidInput("boundedness_classifier: window must be > 0");
  if (traj.rows.size() < 3) throw InvalidInput("boundedness_classifier: trajectory too short");
  const double t0 = traj.rows.front().t, t1 = traj.rows.back().t;
  if (t1 - t0 < 3.0 * window * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "boundedness_classifier: trajectory spans " << t1 - t0 << " but three windows need " << 3.0 * window;
    throw InvalidInput(os.str());
  }
  const auto t = traj.column(&TrajectoryRow::t);
  const auto u0 = traj.column(&TrajectoryRow::u_at_0);
  const auto sup = traj.column(&TrajectoryRow::sup_u);

  Classification c;
  std::ostringstream ev;
  ev.precision(6);
  bool positive = true;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= t1 - window && !(u0[i] > 0.0)) positive = false;
  if (positive) {
    const auto fit = growth_rate_fit(t, u0, window);
    c.r2 = fit.r2;
    ev << "log-slope " << fit.alpha_hat << " r2 " << fit.r2;
    if (fit.alpha_hat > 0.01 && fit.r2 > 0.99) {
      c.verdict = Verdict::growing;
      c.growth_rate = fit.alpha_hat;
      c.evidence = ev.str();
      return c;
    }
  } else {
    ev << "u(0,t) not positive in the last window";
  }

  double lo = INFINITY, hi = -INFINITY;
  bool finite = true;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t1 - 2.0 * window) continue;
    if (!(sup[i] > 0.0) || !std::isfinite(sup[i])) finite = false;
    lo = std::min(lo, sup[i]);
    hi = std::max(hi, sup[i]);
  }
  c.spread = finite ? (hi - lo) / hi : INFINITY;
  if (finite) {
    const auto trend = growth_rate_fit(t, sup, 2.0 * window);
    c.trend = std::abs(trend.alpha_hat) * 2.0 * window;
  } else {
    c.trend = INFINITY;
  }
  ev << "; spread " << c.spread << " trend " << c.trend;
  if (c.spread < 0.01 && c.trend < 0.005) c.verdict = Verdict::bounded;
  c.evidence = ev.str();
  return c;
}

double energy_pass_fraction(const TrajectoryRecord& traj, double rel_tol) {
  std::size_t total = 0, ok = 0;
  for (const auto& r : traj.rows) {
    if (r.t <= 0.0 || std::isnan(r.energy_lhs)) continue;
    ++total;
    if (r.energy_lhs <= r.energy_rhs + rel_tol * std::abs(r.energy_rhs)) ++ok;
  }
  if (total == 0) throw InvalidInput("energy_pass_fraction: no energy samples recorded");
  return static_cast<double>(ok) / static_cast<double>(total);
}

// ------------------------------------------------------------ data families

InitialData concentrated_data(const GridPtr& grid, double m, double radius, double w_ratio) {
  if (!(m > 0.0)) throw InvalidInput("concentrated_data: m must be > 0");
  if (!(radius > 0.0 && radius <= 1.0)) throw InvalidInput("concentrated_data: radius must lie in (0,1]");
  if (!(w_ratio >= 0.0)) throw InvalidInput("concentrated_data: w_ratio must be >= 0");
  // smoothstep from 1 to 0 over the outer third of the radius
  const double r0 = radius * 2.0 / 3.0, width = radius - r0;
  auto u = RadialProfile::sample(grid, [&](double r) {
    const double x = (r - r0) / width;
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    return 1.0 - x * x * (3.0 - 2.0 * x);
  });
  const double scale = m / integrate_disk(u);
  for (auto& x : u.mutable_values()) x *= scale;
  std::vector<double> w(u.values().begin(), u.values().end());
  for (auto& x : w) x *= w_ratio;
  return {u, RadialProfile(grid, std::move(w))};
}

InitialData homogeneous_data(const GridPtr& grid, const ModelParams& p) {
  const double u = p.m / kPi;
  const double w = p.delta > 0.0 ? u / p.delta : u;
  return {RadialProfile::constant(grid, u), RadialProfile::constant(grid, w)};
}

// -------------------------------------------------------------------- sweeps

void SweepConfig::validate() const {
  if (masses.empty()) throw InvalidInput("sweep: no masses given");
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (!(masses[i] > 0.0)) throw InvalidInput("sweep: masses must be positive");
    if (i > 0 && !(masses[i] > masses[i - 1])) throw InvalidInput("sweep: masses must be strictly increasing");
  }
  if (!(horizon > 0.0) || !(dt > 0.0) || !(record_every > 0.0) || !(window > 0.0))
    throw InvalidInput("sweep: horizon, dt, record_every and window must be > 0");
  if (n < 4 || n_data < 4 || nxi < 4) throw InvalidInput("sweep: grids need at least 4 cells");
  if (!(xi_min > 0.0 && xi_min < 1.0 / static_cast<double>(nxi))) throw InvalidInput("sweep: xi_min out of range");
  if (!(xi_ratio > 1.0)) throw InvalidInput("sweep: xi_ratio must exceed 1");
  if (!(eta > 0.0)) throw InvalidInput("sweep: eta must be > 0");
}

XiGrid concentration_grid(double xi_min, double ratio, std::size_t nxi) {
  return XiGrid::graded(xi_min, ratio, 1.0 / static_cast<double>(nxi));
}

RowSetup setup_sweep_row(const SweepConfig& cfg, double m) {
  const ModelParams p = cfg.p.with_mass(m);
  const bool super = m > p.critical_mass();
  PrimalConfig pc;
  pc.dt = cfg.dt;
  pc.t_end = cfg.horizon;
  pc.record_every = cfg.record_every;

  if (cfg.family == DataFamily::homogeneous)
    return {p, homogeneous_data(RadialGrid::uniform(cfg.n), p), XiGrid::uniform(cfg.nxi + 1), pc, std::nullopt};
  if (!super) return {p, concentrated_data(RadialGrid::uniform(cfg.n), m), XiGrid::uniform(cfg.nxi + 1), pc, std::nullopt};

  auto c = grow_up_constants(m, cfg.eta, p);
  auto data = build_grow_up_data(c, p, grow_up_grid(c, cfg.n_data), cfg.eta);
  // grow-up is the expected outcome: let it run through the horizon
  pc.blowup_threshold = 1e300;
  pc.dt_start = 1e-6;
  return {p, std::move(data), concentration_grid(cfg.xi_min, cfg.xi_ratio, cfg.nxi), pc, std::move(c)};
}

RowRun run_sweep_row(const SweepConfig& cfg, double m, const MassObserver& observer) {
  const auto setup = setup_sweep_row(cfg, m);
  RowRun out;
  out.constants = setup.constants;
  const auto ctx = make_context(setup.p, setup.data.w0, setup.xig);
  out.record = run_transformed(mass_function(setup.data.u0, setup.xig), setup.xig, ctx, setup.pc, observer);
  out.classification = boundedness_classifier(out.record, cfg.window);
  return out;
}

std::vector<SweepRow> mass_sweep(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<SweepRow> rows(cfg.masses.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      SweepRow& row = rows[i];
      row.m = cfg.masses[i];
      row.m_over_critical = cfg.p.delta > 0.0 ? row.m / cfg.p.critical_mass() : INFINITY;
      const auto start = std::chrono::steady_clock::now();
      try {
        const auto run = run_sweep_row(cfg, row.m);
        row.verdict = run.classification.verdict;
        if (run.classification.growth_rate) row.alpha_hat = *run.classification.growth_rate;
        row.r2 = run.classification.r2;
        row.sup_u_final = run.record.rows.back().sup_u;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  unsigned nthreads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min<unsigned>(nthreads, static_cast<unsigned>(rows.size()));
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < nthreads; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  bool seen_growing = false;
  for (auto& row : rows) {
    if (row.verdict == Verdict::growing) seen_growing = true;
    if (seen_growing && row.verdict == Verdict::bounded) row.resolution_warning = true;
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows, bool timing) {
  const auto old = os.precision(17);
  os << "m,m_over_critical,verdict,alpha_hat,r2,sup_u_final,runtime_s\n";
  for (const auto& r : rows) {
    os << r.m << ',' << r.m_over_critical << ',' << (r.error.empty() ? to_string(r.verdict) : "Error") << ','
       << r.alpha_hat << ',' << r.r2 << ',' << r.sup_u_final << ',' << (timing ? r.runtime_s : 0.0) << '\n';
  }
  os.precision(old);
}

// ------------------------------------------------------- ordering of pairs

RadialProfile random_density(std::mt19937_64& rng, const GridPtr& grid, double m) {
  std::uniform_real_distribution<double> amp(0.0, 3.0), ctr(0.0, 0.8), wid(0.05, 0.4);
  const double a1 = amp(rng), c1 = ctr(rng), w1 = wid(rng), a2 = amp(rng), c2 = ctr(rng), w2 = wid(rng);
  auto u = RadialProfile::sample(grid, [&](double r) {
    return 0.05 + a1 * std::exp(-std::pow((r - c1) / w1, 2)) + a2 * std::exp(-std::pow((r - c2) / w2, 2));
  });
  const double s = m / integrate_disk(u);
  for (auto& x : u.mutable_values()) x *= s;
  return u;
}

PairOrderingReport random_pair_ordering(const ModelParams& p, std::size_t pairs, std::uint64_t seed,
                                        std::size_t n, const PrimalConfig& cfg) {
  if (pairs == 0) throw InvalidInput("random_pair_ordering: need at least one pair");
  if (n < 4) throw InvalidInput("random_pair_ordering: need at least 4 cells");
  std::mt19937_64 rng(seed);
  const auto g = RadialGrid::uniform(n);
  const auto xig = XiGrid::uniform(n + 1);
  PairOrderingReport rep;
  rep.worst.max_violation = -INFINITY;
  for (std::size_t k = 0; k < pairs; ++k) {
    const auto ctx = make_context(p, random_density(rng, g, p.m), xig);
    const auto Ua = mass_function(random_density(rng, g, p.m), xig);
    const auto Ub = mass_function(random_density(rng, g, p.m), xig);
    std::vector<double> lo(Ua.size()), hi(Ua.size());
    for (std::size_t j = 0; j < lo.size(); ++j) {
      lo[j] = std::min(Ua[j], Ub[j]);
      hi[j] = std::max(Ua[j], Ub[j]);
    }
    UHistory a, b;
    auto keep = [](UHistory& h) {
      return [&h](const MassState& s) {
        h.times.push_back(s.t);
        h.U.push_back(s.U);
      };
    };
    run_transformed(std::move(lo), xig, ctx, cfg, keep(a));
    run_transformed(std::move(hi), xig, ctx, cfg, keep(b));
    const auto r = compare_trajectories(a, b, xig, p.m);
    ++rep.pairs;
    if (!r.passed) ++rep.failed;
    if (r.max_violation > rep.worst.max_violation) rep.worst = r;
  }
  return rep;
}

}  // namespace chemomass
