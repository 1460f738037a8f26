#include "chemomass/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "chemomass/errors.hpp"

namespace chemomass {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

template <class F>
double integrate_0_t(F&& f, double t) {
  if (t <= 0.0) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, t, 20, 1e-13, &err);
}

double forcing_factor(const OperatorContext& ctx, double t) { return std::exp(-ctx.p.kernel_rate() * t); }

}  // namespace

// ------------------------------------------------------------------ family

namespace {

// The barrier in any floating type; the numeric operator uses long double so
// that its finite differences are not swamped by rounding.
template <class T>
T ubar_branch(const SubsolutionSpec& s, bool inner, T xi, T t) {
  const T xi0 = s.xi0, top = T(s.m) / T(2.0L * 3.141592653589793238462643383279502884L);
  const T b = T(s.b0) * std::exp(-T(s.alpha) * t);
  const T a = top * (b + xi0) * (b + xi0) / (b + xi0 * xi0);
  if (inner) return a * xi / (b + xi);
  const T q = b + xi0;
  return (a * b * xi + a * xi0 * xi0) / (q * q);
}

template <class T>
T ubar_generic(const SubsolutionSpec& s, T xi, T t) {
  return ubar_branch<T>(s, xi <= T(s.xi0), xi, t);
}

}  // namespace

double SubsolutionSpec::b(double t) const { return b0 * std::exp(-alpha * t); }
double SubsolutionSpec::b_prime(double t) const { return -alpha * b(t); }

double SubsolutionSpec::a(double t) const {
  const double bt = b(t);
  return m / kTwoPi * (bt + xi0) * (bt + xi0) / (bt + xi0 * xi0);
}

double SubsolutionSpec::a_prime(double t) const {
  const double bt = b(t);
  const double q = bt + xi0 * xi0;
  const double num = bt * bt + 2.0 * bt * xi0 * xi0 - xi0 * xi0 + 2.0 * xi0 * xi0 * xi0;
  return m / kTwoPi * num / (q * q) * b_prime(t);
}

void SubsolutionSpec::validate() const {
  if (!(xi0 > 0.0 && xi0 < 1.0)) throw InvalidInput("barrier: xi0 must lie in (0,1)");
  if (!(b0 > 0.0)) throw InvalidInput("barrier: b0 must be > 0");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidInput("barrier: alpha must be finite and >= 0");
  if (!(m > 0.0)) throw InvalidInput("barrier: m must be > 0");
}

double ubar_eval(const SubsolutionSpec& s, double xi, double t) { return ubar_generic<double>(s, xi, t); }

double ubar_xi(const SubsolutionSpec& s, double xi, double t) {
  const double a = s.a(t), b = s.b(t);
  const double q = xi <= s.xi0 ? b + xi : b + s.xi0;
  return a * b / (q * q);
}

double ubar_xixi(const SubsolutionSpec& s, double xi, double t) {
  if (xi > s.xi0) return 0.0;
  const double a = s.a(t), b = s.b(t);
  const double q = b + xi;
  return -2.0 * a * b / (q * q * q);
}

double ubar_t(const SubsolutionSpec& s, double xi, double t) {
  const double a = s.a(t), b = s.b(t), ap = s.a_prime(t), bp = s.b_prime(t);
  if (xi <= s.xi0) {
    const double q = b + xi;
    return ap * xi / q - a * bp * xi / (q * q);
  }
  const double q = b + s.xi0;
  const double x2 = s.xi0 * s.xi0;
  return (ap * b * xi + a * bp * xi + ap * x2) / (q * q) - 2.0 * (a * b * bp * xi + a * bp * x2) / (q * q * q);
}

double ubar_slope_at_origin(const SubsolutionSpec& s, double t) { return s.a(t) / s.b(t); }

double ubar_parab_inner(const SubsolutionSpec& s, const OperatorContext& ctx, double xi, double t) {
  if (!(xi > 0.0 && xi <= s.xi0)) throw InvalidInput("ubar_parab_inner: xi outside (0, xi0]");
  const auto& p = ctx.p;
  const double k = p.kernel_rate();
  const double a = s.a(t), b = s.b(t), q = b + xi;
  const double top = s.m / kTwoPi;
  const double mem = integrate_0_t(
      [&](double r) { return std::exp(-k * (t - r)) * (s.a(r) / (s.b(r) + xi) - top); }, t);
  const double J = s.a_prime(t) * q / (a * b) - s.b_prime(t) / b + 8.0 / q - (2.0 / p.tau) * mem -
                   2.0 * (ctx.W0_eval(xi) / xi - ctx.kappa0) * forcing_factor(ctx, t);
  return a * b * xi / (q * q) * J;
}

double outer_drift_direct(const SubsolutionSpec& s, double xi, double t) {
  const double a = s.a(t), b = s.b(t), ap = s.a_prime(t), bp = s.b_prime(t);
  const double x2 = s.xi0 * s.xi0;
  return ap * xi / a + bp * xi / b + ap * x2 / (a * b) - 2.0 * (bp * xi + bp * x2 / b) / (b + s.xi0);
}

double outer_drift_identity(const SubsolutionSpec& s, double xi, double t) {
  const double b = s.b(t);
  const double x2 = s.xi0 * s.xi0;
  return -(s.b_prime(t) / b) * x2 * (1.0 - xi) / (b + x2);
}

double ubar_parab_outer(const SubsolutionSpec& s, const OperatorContext& ctx, double xi, double t) {
  if (!(xi > s.xi0 && xi < 1.0)) throw InvalidInput("ubar_parab_outer: xi outside (xi0, 1)");
  const auto& p = ctx.p;
  const double k = p.kernel_rate();
  const double a = s.a(t), b = s.b(t), q = b + s.xi0;
  const double x2 = s.xi0 * s.xi0;
  const double top = s.m / kTwoPi;
  const double mem = integrate_0_t(
      [&](double r) {
        const double ar = s.a(r), br = s.b(r), qr = br + s.xi0;
        return std::exp(-k * (t - r)) * ((ar * br * xi + ar * x2) / (qr * qr) - top * xi);
      },
      t);
  const double J = outer_drift_identity(s, xi, t) - (2.0 / p.tau) * mem -
                   2.0 * (ctx.W0_eval(xi) - ctx.kappa0 * xi) * forcing_factor(ctx, t);
  return a * b / (q * q) * J;
}

double ubar_parab_numeric(const SubsolutionSpec& s, const OperatorContext& ctx, double xi, double t,
                          double* scale) {
  if (!(xi > 0.0 && xi < 1.0) || xi == s.xi0) throw InvalidInput("ubar_parab_numeric: xi must avoid 0, xi0, 1");
  using L = long double;
  // Fourth-order stencils with h on the scale b + xi of the rational branch.
  // Each branch formula is smooth on its own side of xi0, so near the kink the
  // stencil turns one-sided and stays on the branch that owns xi.
  const L b = s.b(t);
  const L h = 2e-3L * (b + L(xi));
  const L ht = s.alpha > 0.0 ? 1e-3L / L(s.alpha) : 1e-3L;
  const L X = xi, T = t;
  const bool inner = xi < s.xi0;
  auto f = [&](L dx, L dt) { return ubar_branch<L>(s, inner, X + dx, T + dt); };
  L d1, d2;
  if (std::abs(L(xi) - L(s.xi0)) > 2.5L * h) {
    const L f0 = f(0, 0), fp1 = f(h, 0), fm1 = f(-h, 0), fp2 = f(2 * h, 0), fm2 = f(-2 * h, 0);
    d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h);
    d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h);
  } else {
    const L g = inner ? -h : h;  // step away from xi0
    L v[6];
    for (int i = 0; i < 6; ++i) v[i] = f(i * g, 0);
    d1 = (-25 * v[0] + 48 * v[1] - 36 * v[2] + 16 * v[3] - 3 * v[4]) / (12 * g);
    d2 = (45 * v[0] - 154 * v[1] + 214 * v[2] - 156 * v[3] + 61 * v[4] - 10 * v[5]) / (12 * h * h);
  }
  const double U_xi = static_cast<double>(d1);
  const double U_xixi = static_cast<double>(d2);
  const double Ut =
      static_cast<double>((f(0, -2 * ht) - 8 * f(0, -ht) + 8 * f(0, ht) - f(0, 2 * ht)) / (12 * ht));

  const double k = ctx.p.kernel_rate();
  const double lin = s.m / kTwoPi * xi;
  const double I = integrate_0_t([&](double r) { return std::exp(-k * (t - r)) * (ubar_eval(s, xi, r) - lin); }, t);

  if (scale) {
    const double fw = 2.0 * std::abs(ctx.W0_eval(xi) - ctx.kappa0 * xi) * forcing_factor(ctx, t);
    *scale = std::abs(Ut) + std::abs(4.0 * xi * U_xixi) + std::abs(2.0 / ctx.p.tau * I * U_xi) + fw * std::abs(U_xi);
  }
  return parab_point(xi, Ut, U_xi, U_xixi, I, ctx, t);
}

// ----------------------------------------------------------------- recipes

double inner_margin_c1(const ModelParams& p, double eps) {
  if (!(p.delta > 0.0)) throw InvalidInput("inner_margin_c1: delta must be > 0");
  const double e = 1.0 - eps;
  return e * e * e * p.m / ((1.0 + eps) * kPi * p.delta) - 8.0;
}

InnerParams choose_inner_params(const ModelParams& p) {
  if (!(p.m > p.critical_mass())) {
    std::ostringstream os;
    os << "choose_inner_params: m = " << p.m << " is not above the critical mass " << p.critical_mass();
    throw RegimeError(os.str());
  }
  InnerParams out;
  if (p.delta == 0.0) {
    // Without decay the memory grows linearly in time, so the time integral
    // against 1/(b(s)+xi) alone must supply the factor 12: then c1 >= 4 >= 4 alpha.
    out.delta_zero_limit = true;
    out.eps = 0.25;
    const double e = 1.0 - out.eps;
    const double L = std::log(1.0 / e);
    const double gain = e * e * p.m * L / ((1.0 + out.eps) * kPi * p.tau);
    out.alpha_star = std::min(1.0, gain / 12.0);
    out.c1 = gain / out.alpha_star - 8.0;
    out.xi0 = 0.5 * out.eps;
    return out;
  }

  double eps_max = 0.5;
  if (!(inner_margin_c1(p, 0.5) > 0.0)) {
    double lo = 0.0, hi = 0.5;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      (inner_margin_c1(p, mid) > 0.0 ? lo : hi) = mid;
    }
    eps_max = lo;
  }
  out.eps = 0.5 * eps_max;
  out.c1 = inner_margin_c1(p, out.eps);
  const double time_factor = p.delta * std::log(1.0 / (1.0 - out.eps)) / (p.tau * std::log(1.0 / out.eps));
  out.alpha_star = std::min(out.c1 / 4.0, time_factor);
  out.xi0 = 0.5 * out.eps;
  return out;
}

double choose_outer_alpha(const ModelParams& p, double eta0, double alpha_star) {
  if (!(eta0 > 0.0)) throw InvalidInput("choose_outer_alpha: eta0 must be > 0");
  if (!(alpha_star > 0.0)) throw InvalidInput("choose_outer_alpha: alpha_star must be > 0");
  const double r = p.kernel_rate();
  const double a1 = p.m / (kTwoPi * p.tau * std::exp(r));
  const double a2 = 2.0 * eta0 / std::exp(2.0 * r);
  return 0.9 * std::min({a1, a2, alpha_star});
}

std::pair<double, double> choose_b0_t0(double alpha, double eps, double xi0) {
  if (!(alpha > 0.0)) throw InvalidInput("choose_b0_t0: alpha must be > 0");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("choose_b0_t0: eps must lie in (0,1)");
  return {0.5 * eps * xi0 * xi0, 2.0 / alpha * std::log(1.0 / (1.0 - eps))};
}

double gamma0(double alpha, double b0, double xi0, double t0, const ModelParams& p) {
  return 0.5 * ((1.0 / xi0 + 1.0) * alpha + 8.0 / b0 * std::exp(alpha * t0)) * std::exp(p.kernel_rate() * t0);
}

GrowUpConstants grow_up_constants(double m, double eta, const ModelParams& p0) {
  if (!(eta > 0.0)) throw InvalidInput("grow_up_constants: eta must be > 0");
  const ModelParams p = p0.with_mass(m);
  const InnerParams in = choose_inner_params(p);
  const double alpha = choose_outer_alpha(p, 0.5 * eta, in.alpha_star);
  const auto [b0, t0] = choose_b0_t0(alpha, in.eps, in.xi0);

  GrowUpConstants c;
  c.alpha_star = in.alpha_star;
  c.delta_zero_limit = in.delta_zero_limit;
  c.barrier = SubsolutionSpec{in.xi0, b0, alpha, t0, m, eta, in.eps, in.c1};
  c.Gamma0 = gamma0(alpha, b0, in.xi0, t0, p);
  c.R = std::sqrt(in.xi0);
  const double x2 = in.xi0 * in.xi0;
  c.Gamma_u = m / kPi * (b0 + in.xi0) * (b0 + in.xi0) / (b0 * (b0 + x2));
  c.gamma_small = m / kPi * b0 / (b0 + x2);
  c.Gamma_w = 2.0 * c.Gamma0;
  return c;
}

// ------------------------------------------------------- initial data

namespace {

double smooth_cutoff(double x) {
  if (x <= 0.0) return 1.0;
  if (x >= 1.0) return 0.0;
  return 1.0 - x * x * (3.0 - 2.0 * x);
}

// Cumulative integrals over B_{r_f} for every face f.
std::vector<double> ball_integrals(const RadialProfile& f) {
  const auto A = f.grid().areas();
  std::vector<double> cum(f.size() + 1, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) cum[i + 1] = cum[i] + A[i] * f[i];
  return cum;
}

}  // namespace

DataConditionReport check_grow_up_conditions(const GrowUpConstants& c, const RadialProfile& u0,
                                                const RadialProfile& w0, double eta) {
  const auto r = u0.grid().faces();
  const std::size_t n = u0.size();
  const auto cu = ball_integrals(u0);
  const auto cw = ball_integrals(w0);
  const double mean_w = cw[n] / kPi;
  const double b0 = c.barrier.b0;
  const double inf = std::numeric_limits<double>::infinity();

  DataConditionReport rep;
  rep.inner_u_margin = rep.outer_u_margin = rep.inner_w_margin = rep.outer_w_margin = inf;
  bool literal = true;
  for (std::size_t f = 1; f < n; ++f) {
    const double rf = r[f], r2 = rf * rf;
    const double in_area = kPi * r2, out_area = kPi * (1.0 - r2);
    if (rf < c.R) {
      const double mu = cu[f] / in_area;
      rep.inner_u_margin = std::min(rep.inner_u_margin, mu - c.Gamma_u * b0 / (b0 + r2));
      rep.inner_w_margin = std::min(rep.inner_w_margin, cw[f] / in_area - mean_w - c.Gamma_w);
      if (literal && mu >= c.Gamma_u) rep.literal_inner_radius = rf;
      else literal = false;
    } else {
      rep.outer_u_margin = std::min(rep.outer_u_margin, c.gamma_small - (cu[n] - cu[f]) / out_area);
      rep.outer_w_margin = std::min(rep.outer_w_margin, mean_w - eta - (cw[n] - cw[f]) / out_area);
    }
  }
  return rep;
}

GridPtr grow_up_grid(const GrowUpConstants& c, std::size_t n_outer) {
  if (n_outer < 4) throw InvalidInput("grow_up_grid: need at least 4 outer cells");
  // radius of a disk holding mass m at density 1.1 Gamma_u
  const double rho = std::sqrt(c.barrier.m / (1.1 * c.Gamma_u * kPi));
  const double h_out = 1.0 / static_cast<double>(n_outer);
  const double r_split = std::min(0.95, 1.2 * c.R);
  return RadialGrid::two_zone(r_split, std::min(rho / 32.0, h_out), h_out);
}

InitialData build_grow_up_data(const GrowUpConstants& c, const ModelParams& p, const GridPtr& grid,
                                  double eta) {
  const double m = c.barrier.m;
  (void)p;
  auto u_shape = [&](double rho) {
    return RadialProfile::sample(grid, [rho](double r) { return smooth_cutoff((r - rho) / (0.5 * rho)); });
  };

  // the smaller rho, the larger the peak m / int(shape); aim for 1.1 Gamma_u
  const double target = 1.1 * c.Gamma_u;
  const double hmin = grid->min_width();
  double lo = 0.5 * hmin, hi = c.R;
  if (m / integrate_disk(u_shape(hi)) > target)
    throw ConstructionError("build_grow_up_data: the mass cannot reach the required inner average");
  for (int it = 0; it < 100; ++it) {
    const double mid = std::sqrt(lo * hi);
    const double peak = m / integrate_disk(u_shape(mid));
    (peak > target ? lo : hi) = mid;
  }
  const double rho = hi;
  if (rho < 8.0 * grid->width(0)) {
    std::ostringstream os;
    os << "build_grow_up_data: concentration radius " << rho << " is under-resolved (inner cell width "
       << grid->width(0) << "); refine the grid";
    throw ConstructionError(os.str());
  }
  auto shape = u_shape(rho);
  const double scale = m / integrate_disk(shape);
  for (auto& x : shape.mutable_values()) x *= scale;
  RadialProfile u0 = std::move(shape);

  // w0 = M chi + base with chi a smoothed indicator of B_R; the base cancels in both w conditions
  auto chi = RadialProfile::sample(grid, [&](double r) { return smooth_cutoff((r - 0.9 * c.R) / (0.1 * c.R)); });
  const auto cchi = ball_integrals(chi);
  const double mean_chi = cchi.back() / kPi;
  double dmin = std::numeric_limits<double>::infinity();
  const auto r = grid->faces();
  for (std::size_t f = 1; f < grid->size(); ++f)
    if (r[f] < c.R) dmin = std::min(dmin, cchi[f] / (kPi * r[f] * r[f]) - mean_chi);
  if (!(dmin > 0.0)) throw ConstructionError("build_grow_up_data: grid does not resolve the radius R");
  const double M = 1.1 * c.Gamma_w / dmin;
  const double base = 1.0;
  std::vector<double> wv(grid->size());
  for (std::size_t i = 0; i < wv.size(); ++i) wv[i] = M * chi[i] + base;
  RadialProfile w0(grid, std::move(wv));

  const auto rep = check_grow_up_conditions(c, u0, w0, eta);
  if (!rep.ok()) {
    std::ostringstream os;
    os << "build_grow_up_data: verification failed (margins u_in " << rep.inner_u_margin << ", u_out "
       << rep.outer_u_margin << ", w_in " << rep.inner_w_margin << ", w_out " << rep.outer_w_margin << ")";
    throw ConstructionError(os.str());
  }
  return {std::move(u0), std::move(w0)};
}

// ------------------------------------------------------- subcritical bound

double mass_ratio_bound(std::span<const double> phi, const XiGrid& xig, double m, double eps) {
  if (phi.size() != xig.size()) throw InvalidInput("mass_ratio_bound: phi does not match the grid");
  if (!(m > 0.0) || !(eps > 0.0)) throw InvalidInput("mass_ratio_bound: need m > 0 and eps > 0");
  const double top = m / kTwoPi;
  if (std::abs(phi[0]) > 1e-14 * top) throw InvalidInput("mass_ratio_bound: phi(0) must vanish");
  for (double x : phi) {
    if (!std::isfinite(x)) throw InvalidInput("mass_ratio_bound: phi is not finite");
    if (x > top * (1.0 + 1e-12)) throw InvalidInput("mass_ratio_bound: phi exceeds m/2pi");
  }
  auto feasible = [&](double b) {
    for (std::size_t j = 1; j < phi.size(); ++j) {
      const double xi = xig[j];
      if (phi[j] > top * (b + 1.0 + eps) * xi / (b + xi)) return false;
    }
    return true;
  };

  double hi = 1.0 - 1e-12;
  if (feasible(hi)) return hi;
  double lo = 0.1;
  while (!feasible(lo)) {
    lo *= 0.1;
    if (lo < 1e-300) throw InvalidInput("mass_ratio_bound: no b > 0 bounds phi; phi is not O(xi) at the origin");
  }
  hi = std::min(hi, 10.0 * lo);
  for (int it = 0; it < 200 && hi / lo > 1.0 + 1e-13; ++it) {
    const double mid = std::sqrt(lo * hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

SupersolutionBound supersolution_bound(const ModelParams& p, double w0_supnorm, std::span<const double> times,
                                       const std::vector<std::vector<double>>& U_hist, const XiGrid& xig) {
  if (!(p.m < p.critical_mass())) {
    std::ostringstream os;
    os << "supersolution_bound: m = " << p.m << " is not below the critical mass " << p.critical_mass();
    throw RegimeError(os.str());
  }
  if (times.size() != U_hist.size() || times.empty()) throw InvalidInput("supersolution_bound: empty history");
  if (!(w0_supnorm >= 0.0)) throw InvalidInput("supersolution_bound: |w0|_inf must be >= 0");

  SupersolutionBound out;
  out.eps = 0.5 * (p.critical_mass() / p.m - 1.0);
  const double c1 = 0.5 * w0_supnorm;
  const double lead = p.m / (kPi * p.delta) * (1.0 + out.eps);
  std::size_t k0 = times.size();
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (8.0 >= lead + 4.0 * c1 * std::exp(-p.kernel_rate() * times[k])) {
      k0 = k;
      break;
    }
  }
  if (k0 == times.size()) throw InvalidInput("supersolution_bound: the history ends before the forcing has decayed");
  out.t0 = times[k0];

  std::vector<double> phi(xig.size(), 0.0);
  for (std::size_t k = 0; k <= k0; ++k) {
    if (U_hist[k].size() != xig.size()) throw InvalidInput("supersolution_bound: snapshot does not match the grid");
    for (std::size_t j = 0; j < phi.size(); ++j) phi[j] = std::max(phi[j], U_hist[k][j]);
  }
  out.b = mass_ratio_bound(phi, xig, p.m, out.eps);
  out.a = p.m / kTwoPi * (out.b + 1.0 + out.eps);
  out.C = out.a / out.b;
  return out;
}

double supersolution_parab(const SupersolutionBound& bound, const OperatorContext& ctx, double xi, double t) {
  if (!(xi > 0.0 && xi <= 1.0)) throw InvalidInput("supersolution_parab: xi outside (0,1]");
  const auto& p = ctx.p;
  const double a = bound.a, b = bound.b, q = b + xi;
  const double e = std::exp(-p.kernel_rate() * t);
  const double E = memory_weight(p.kernel_rate(), t);
  const double J = 8.0 / q - (2.0 / p.tau) * E * (a / q - p.m / kTwoPi) - 2.0 * (ctx.W0_eval(xi) / xi - ctx.kappa0) * e;
  return a * b * xi / (q * q) * J;
}

// ------------------------------------------------------------ certificates

std::vector<double> log_samples(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) throw InvalidInput("log_samples: need 0 < lo < hi and n >= 2");
  std::vector<double> x(n);
  const double L = std::log(hi / lo);
  for (std::size_t i = 0; i < n; ++i) x[i] = lo * std::exp(L * static_cast<double>(i) / static_cast<double>(n - 1));
  x.back() = hi;
  return x;
}

std::vector<double> linear_samples(double lo, double hi, std::size_t n) {
  if (!(hi > lo) || n < 2) throw InvalidInput("linear_samples: need lo < hi and n >= 2");
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  x.back() = hi;
  return x;
}

namespace {

constexpr std::size_t kMaxStoredViolations = 1000;

template <class F>
BarrierReport sweep(BarrierReport::Region region, std::span<const double> xs, std::span<const double> ts,
                    double slack, F&& residual) {
  BarrierReport rep;
  rep.region = region;
  rep.slack = slack;
  rep.max_residual = -std::numeric_limits<double>::infinity();
  rep.samples.reserve(xs.size() * ts.size());
  for (double t : ts) {
    for (double xi : xs) {
      const double res = residual(xi, t);
      if (!std::isfinite(res)) {
        std::ostringstream os;
        os << "certificate: non-finite residual at xi = " << xi << ", t = " << t;
        throw NumericalError(os.str());
      }
      rep.samples.push_back({xi, t, res});
      rep.max_residual = std::max(rep.max_residual, res);
      if (res > slack && rep.violating_points.size() < kMaxStoredViolations) rep.violating_points.emplace_back(xi, t);
    }
  }
  rep.sample_count = rep.samples.size();
  rep.passed = rep.max_residual <= slack;
  return rep;
}

}  // namespace

BarrierReport certify_barrier(BarrierReport::Region region, const SubsolutionSpec& spec,
                              const OperatorContext& ctx, std::span<const double> xs, std::span<const double> ts,
                              double slack) {
  spec.validate();
  switch (region) {
    case BarrierReport::Region::inner:
      return sweep(region, xs, ts, slack, [&](double xi, double t) { return ubar_parab_inner(spec, ctx, xi, t); });
    case BarrierReport::Region::outer:
      return sweep(region, xs, ts, slack, [&](double xi, double t) { return ubar_parab_outer(spec, ctx, xi, t); });
    case BarrierReport::Region::super:
      break;
  }
  throw InvalidInput("certify_barrier: use certify_supersolution for the supersolution");
}

BarrierReport certify_supersolution(const SupersolutionBound& bound, const OperatorContext& ctx,
                                    std::span<const double> xs, std::span<const double> ts, double slack) {
  return sweep(BarrierReport::Region::super, xs, ts, slack,
               [&](double xi, double t) { return -supersolution_parab(bound, ctx, xi, t); });
}

void write_barrier_report(std::ostream& os, const BarrierReport& r) {
  const char* name = r.region == BarrierReport::Region::inner   ? "inner"
                     : r.region == BarrierReport::Region::outer ? "outer"
                                                                : "super";
  const auto old = os.precision(17);
  os << "region " << name << "\n";
  os << "samples " << r.sample_count << "\n";
  os << "max_residual " << r.max_residual << "\n";
  os << "slack " << r.slack << "\n";
  os << "violations " << r.violating_points.size() << "\n";
  os << "passed " << (r.passed ? "true" : "false") << "\n";
  const std::size_t shown = std::min<std::size_t>(r.violating_points.size(), 10);
  for (std::size_t i = 0; i < shown; ++i)
    os << "violation xi=" << r.violating_points[i].first << " t=" << r.violating_points[i].second << "\n";
  os.precision(old);
}

void write_barrier_csv(std::ostream& os, const BarrierReport& r) {
  const auto old = os.precision(17);
  os << "xi,t,residual\n";
  for (const auto& s : r.samples) os << s.xi << ',' << s.t << ',' << s.residual << '\n';
  os.precision(old);
}

// -------------------------------------------------------------- ordering

OrderingReport compare_trajectories(const UHistory& lower, const UHistory& upper, const XiGrid& xig, double m) {
  if (lower.times.size() != upper.times.size() || lower.U.size() != lower.times.size() ||
      upper.U.size() != upper.times.size())
    throw InvalidInput("compare_trajectories: histories have different lengths");
  OrderingReport rep;
  rep.tolerance = 1e-8 * m;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < lower.times.size(); ++k) {
    const double t = lower.times[k];
    if (std::abs(t - upper.times[k]) > 1e-9 * std::max(1.0, std::abs(t)))
      throw InvalidInput("compare_trajectories: recorded times differ");
    if (lower.U[k].size() != xig.size() || upper.U[k].size() != xig.size())
      throw InvalidInput("compare_trajectories: snapshots live on different grids");
    for (std::size_t j = 0; j < xig.size(); ++j) {
      const double d = lower.U[k][j] - upper.U[k][j];
      if (d > rep.max_violation) {
        rep.max_violation = d;
        rep.at_xi = xig[j];
        rep.at_t = t;
      }
    }
  }
  rep.passed = rep.max_violation <= rep.tolerance;
  return rep;
}

UHistory barrier_history(const SubsolutionSpec& spec, const XiGrid& xig, std::span<const double> times) {
  UHistory h;
  h.times.assign(times.begin(), times.end());
  for (double t : times) {
    std::vector<double> U(xig.size());
    for (std::size_t j = 0; j < U.size(); ++j) U[j] = ubar_eval(spec, xig[j], t);
    h.U.push_back(std::move(U));
  }
  return h;
}

}  // namespace chemomass
