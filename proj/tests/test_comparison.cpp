#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "chemomass/comparison.hpp"
#include "chemomass/errors.hpp"
#include "chemomass/experiments.hpp"
#include "doctest.h"

using namespace chemomass;

namespace {

const ModelParams kUnit(1.0, 1.0, 12.0 * kPi);

SubsolutionSpec sample_spec() {
  SubsolutionSpec s;
  s.xi0 = 0.05;
  s.b0 = 2e-4;
  s.alpha = 0.2;
  s.t0 = 1.0;
  s.m = 12.0 * kPi;
  s.eta = 1.0;
  s.eps = 0.1;
  return s;
}

OperatorContext sample_context(const ModelParams& p) {
  // W0 of w0(r) = 30 exp(-10 r^2): W0(xi) = 1.5 (1 - e^{-10 xi})
  auto W0 = [](double xi) { return 1.5 * -std::expm1(-10.0 * xi); };
  return make_context(p, W0, XiGrid::uniform(11));
}

// P at one point from the defining formula with analytic derivatives and a
// separately integrated memory term.
double parab_from_derivatives(const SubsolutionSpec& s, const OperatorContext& ctx, double xi, double t) {
  const double k = ctx.p.kernel_rate();
  auto f = [&](double r) { return std::exp(-k * (t - r)) * (ubar_eval(s, xi, r) - s.m / (2.0 * kPi) * xi); };
  const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, t, 20, 1e-14);
  return parab_point(xi, ubar_t(s, xi, t), ubar_xi(s, xi, t), ubar_xixi(s, xi, t), I, ctx, t);
}

}  // namespace

TEST_CASE("barrier boundary values and continuity") {
  const auto s = sample_spec();
  for (double t : {0.0, 1.0, 10.0, 40.0}) {
    CHECK(ubar_eval(s, 0.0, t) == 0.0);
    CHECK(ubar_eval(s, 1.0, t) == doctest::Approx(s.m / (2.0 * kPi)).epsilon(1e-14));
    // both branches at xi0
    const double a = s.a(t), b = s.b(t), q = b + s.xi0;
    const double left = a * s.xi0 / (b + s.xi0);
    const double right = (a * b * s.xi0 + a * s.xi0 * s.xi0) / (q * q);
    CHECK(left == doctest::Approx(right).epsilon(1e-14));
    CHECK(ubar_xi(s, s.xi0, t) == doctest::Approx(ubar_xi(s, std::nextafter(s.xi0, 1.0), t)).epsilon(1e-12));
  }
}

TEST_CASE("barrier derivatives against finite differences") {
  const auto s = sample_spec();
  for (double t : {0.5, 3.0, 12.0}) {
    for (double xi : {1e-4, 3e-3, 0.02, 0.2, 0.7}) {
      const double h = 1e-5 * std::min({xi, std::abs(xi - s.xi0)});
      const double fd1 = (ubar_eval(s, xi + h, t) - ubar_eval(s, xi - h, t)) / (2.0 * h);
      // a second difference needs a wider step than the first to stay clear of rounding
      const double h2 = 1e-3 * std::min({xi, std::abs(xi - s.xi0)});
      const double fd2 =
          (ubar_eval(s, xi + h2, t) - 2.0 * ubar_eval(s, xi, t) + ubar_eval(s, xi - h2, t)) / (h2 * h2);
      const double ht = 1e-4;
      const double fdt = (ubar_eval(s, xi, t + ht) - ubar_eval(s, xi, t - ht)) / (2.0 * ht);
      CHECK(ubar_xi(s, xi, t) == doctest::Approx(fd1).epsilon(1e-7));
      if (xi < s.xi0) CHECK(ubar_xixi(s, xi, t) == doctest::Approx(fd2).epsilon(1e-4));
      else CHECK(ubar_xixi(s, xi, t) == 0.0);
      CHECK(ubar_t(s, xi, t) == doctest::Approx(fdt).epsilon(1e-6));
    }
    // a'(t) against differencing a
    const double ht = 1e-5;
    CHECK(s.a_prime(t) == doctest::Approx((s.a(t + ht) - s.a(t - ht)) / (2.0 * ht)).epsilon(1e-6));
  }
}

TEST_CASE("closed-form operator matches the defining formula") {
  const auto s = sample_spec();
  for (double delta : {1.0, 0.0}) {
    const ModelParams p(delta, 1.0, s.m);
    const auto ctx = sample_context(p);
    for (double t : {0.3, 2.0, 9.0}) {
      for (double xi : {1e-5, 1e-3, 0.01, 0.049}) {
        const double direct = parab_from_derivatives(s, ctx, xi, t);
        CHECK(ubar_parab_inner(s, ctx, xi, t) == doctest::Approx(direct).epsilon(1e-8));
      }
      for (double xi : {0.051, 0.3, 0.9}) {
        const double direct = parab_from_derivatives(s, ctx, xi, t);
        CHECK(ubar_parab_outer(s, ctx, xi, t) == doctest::Approx(direct).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("closed-form operator matches finite differences") {
  const auto s = sample_spec();
  const auto ctx = sample_context(kUnit);
  for (double t : {0.5, 4.0, 20.0}) {
    for (double xi : {1e-4, 0.02, 0.3, 0.8}) {
      const double num = ubar_parab_numeric(s, ctx, xi, t);
      const double ana = xi < s.xi0 ? ubar_parab_inner(s, ctx, xi, t) : ubar_parab_outer(s, ctx, xi, t);
      CHECK(std::abs(num - ana) <= 1e-6 * std::max(std::abs(num), std::abs(ana)));
    }
  }
}

TEST_CASE("outer drift simplification") {
  const auto s = sample_spec();
  for (double t : {0.0, 1.0, 25.0})
    for (double xi : {0.06, 0.4, 0.99})
      CHECK(outer_drift_direct(s, xi, t) == doctest::Approx(outer_drift_identity(s, xi, t)).epsilon(1e-12));
}

TEST_CASE("barrier slope grows exponentially") {
  const auto s = sample_spec();
  for (double t : {30.0, 60.0}) {
    REQUIRE(s.b(t) < s.xi0 * s.xi0);
    CHECK(ubar_slope_at_origin(s, t) >= s.m / (4.0 * kPi) * std::exp(s.alpha * t) / s.b0);
  }
}

TEST_CASE("outer rate recipe") {
  const ModelParams p(1.0, 1.0, 10.0 * kPi);
  const double alpha0 = std::min({5.0 / std::exp(1.0), 2.0 / std::exp(2.0), 1.0});
  CHECK(alpha0 == doctest::Approx(0.27067).epsilon(1e-5));
  CHECK(choose_outer_alpha(p, 1.0, 1.0) == doctest::Approx(0.24360).epsilon(1e-4));
  const ModelParams p0(0.0, 1.0, 10.0 * kPi);
  CHECK(choose_outer_alpha(p0, 1.0, 1.0) == doctest::Approx(0.9 * std::min({5.0, 2.0, 1.0})));
  CHECK(choose_outer_alpha(p, 1e-9, 1.0) < 1e-8);
  CHECK_THROWS_AS(choose_outer_alpha(p, 0.0, 1.0), InvalidInput);
}

TEST_CASE("inner recipe") {
  const ModelParams p10(1.0, 1.0, 10.0 * kPi);
  CHECK(inner_margin_c1(p10, 0.05) == doctest::Approx(0.857375 * 10.0 / 1.05 - 8.0).epsilon(1e-12));
  CHECK(inner_margin_c1(p10, 0.05) == doctest::Approx(0.16548).epsilon(1e-4));

  const ModelParams p16(1.0, 1.0, 16.0 * kPi);
  for (double e = 0.01; e <= 0.1; e += 0.01) CHECK(inner_margin_c1(p16, e) > 0.0);
  const auto in = choose_inner_params(p16);
  CHECK(in.c1 > 2.0);
  CHECK(in.xi0 == doctest::Approx(in.eps / 2.0));
  // the halved eps sits at half the root of c1
  CHECK(std::abs(inner_margin_c1(p16, 2.0 * in.eps)) < 1e-9);
  CHECK(in.alpha_star <= in.c1 / 4.0);
  CHECK(in.alpha_star <= std::log(1.0 / (1.0 - in.eps)) / std::log(1.0 / in.eps) + 1e-15);

  CHECK_THROWS_AS(choose_inner_params(ModelParams(1.0, 1.0, 8.0 * kPi)), RegimeError);
  CHECK_THROWS_AS(choose_inner_params(ModelParams(1.0, 1.0, 4.0 * kPi)), RegimeError);

  const auto z = choose_inner_params(ModelParams(0.0, 1.0, kPi));
  CHECK(z.delta_zero_limit);
  CHECK(z.eps == 0.25);
  CHECK(z.c1 >= 4.0 - 1e-12);
  CHECK(z.alpha_star > 0.0);
  CHECK(z.alpha_star <= 1.0);
}

TEST_CASE("start parameters and the inner constant") {
  const auto [b0, t0] = choose_b0_t0(0.1, 0.05, 0.025);
  CHECK(b0 == doctest::Approx(1.5625e-5).epsilon(1e-12));
  CHECK(t0 == doctest::Approx(20.0 * std::log(1.0 / 0.95)).epsilon(1e-14));
  CHECK(t0 == doctest::Approx(1.0259).epsilon(1e-4));
  CHECK(b0 < 0.025 * 0.025);

  const ModelParams p(1.0, 1.0, 12.0 * kPi);
  // hand evaluation of 1/2 {41 * 0.1 + 512000 e^{0.1 t0}} e^{t0}
  const double by_hand = 0.5 * (4.1 + 512000.0 * std::exp(0.1 * t0)) * std::exp(t0);
  const double g = gamma0(0.1, b0, 0.025, t0, p);
  CHECK(g == doctest::Approx(by_hand).epsilon(1e-14));
  CHECK(g == doctest::Approx(7.913e5).epsilon(1e-3));
  CHECK(gamma0(0.1, b0, 0.025, 2.0 * t0, p) > g);
  CHECK(gamma0(0.1, 1e-3 * b0, 0.025, t0, p) > 900.0 * g);
}

TEST_CASE("grow-up constants") {
  for (double delta : {1.0, 0.0}) {
    const double m = delta > 0.0 ? 12.0 * kPi : kPi;
    const ModelParams p(delta, 1.0, m);
    const auto c = grow_up_constants(m, 1.0, p);
    const auto& s = c.barrier;
    CHECK(c.R == doctest::Approx(std::sqrt(s.xi0)));
    CHECK(c.Gamma_u * kPi * s.b0 * (s.b0 + s.xi0 * s.xi0) / (m * (s.b0 + s.xi0) * (s.b0 + s.xi0)) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.gamma_small < m / kPi);
    CHECK(c.Gamma_w == 2.0 * c.Gamma0);
    CHECK(s.b0 < s.xi0 * s.xi0);
    CHECK(s.alpha < c.alpha_star);
    CHECK(s.alpha > 0.0);
    CHECK(c.delta_zero_limit == (delta == 0.0));
  }
  CHECK_THROWS_AS(grow_up_constants(4.0 * kPi, 1.0, ModelParams(1.0, 1.0, 4.0 * kPi)), RegimeError);
}

TEST_CASE("grow-up data satisfies its averaged conditions") {
  const double m = 12.0 * kPi;
  const auto c = grow_up_constants(m, 1.0, kUnit);
  const auto grid = RadialGrid::uniform(4096);
  const auto d = build_grow_up_data(c, kUnit, grid, 1.0);
  CHECK(integrate_disk(d.u0) == doctest::Approx(m).epsilon(1e-10));
  CHECK(d.u0.min() >= 0.0);
  CHECK(d.w0.min() > 0.0);

  // independent pass over every face radius
  const auto r = grid->faces();
  double in_u = 0.0, in_w = 0.0;
  const double total_u = integrate_disk(d.u0), total_w = integrate_disk(d.w0);
  const double b0 = c.barrier.b0;
  for (std::size_t f = 1; f < grid->size(); ++f) {
    in_u += grid->areas()[f - 1] * d.u0[f - 1];
    in_w += grid->areas()[f - 1] * d.w0[f - 1];
    const double area = kPi * r[f] * r[f];
    if (r[f] < c.R) {
      CHECK(in_u / area >= c.Gamma_u * b0 / (b0 + r[f] * r[f]));
      CHECK(in_w / area - total_w / kPi >= c.Gamma_w);
    } else {
      const double out_area = kPi - area;
      CHECK((total_u - in_u) / out_area <= c.gamma_small);
      CHECK((total_w - in_w) / out_area <= total_w / kPi - 1.0);
    }
  }
  // the initial mass function lies above the barrier at t = 0
  const auto xig = XiGrid::uniform(2049);
  const auto U0 = mass_function(d.u0, xig);
  for (std::size_t j = 0; j < xig.size(); ++j) CHECK(U0[j] >= ubar_eval(c.barrier, xig[j], 0.0) - 1e-12);

  const auto rep = check_grow_up_conditions(c, d.u0, d.w0, 1.0);
  CHECK(rep.ok());
  CHECK(rep.literal_inner_radius > 0.0);
  CHECK(rep.literal_inner_radius < c.R);

  CHECK_THROWS_AS(build_grow_up_data(c, kUnit, RadialGrid::uniform(64), 1.0), ConstructionError);
}

TEST_CASE("mass ratio bound") {
  const double m = 4.0 * kPi, top = m / (2.0 * kPi), eps = 0.5;
  const auto xig = XiGrid::uniform(201);
  auto verify = [&](const std::vector<double>& phi, double b) {
    for (std::size_t j = 0; j < phi.size(); ++j) CHECK(phi[j] <= top * (b + 1.0 + eps) * xig[j] / (b + xig[j]));
  };
  SUBCASE("linear profile") {
    std::vector<double> phi(xig.size());
    for (std::size_t j = 0; j < phi.size(); ++j) phi[j] = top * xig[j];
    const double b = mass_ratio_bound(phi, xig, m, eps);
    CHECK(b > 0.999);
    CHECK(b < 1.0);
    verify(phi, b);
  }
  SUBCASE("steep profile") {
    std::vector<double> phi(xig.size());
    for (std::size_t j = 0; j < phi.size(); ++j) phi[j] = std::min(2.0 * top * xig[j], top);
    const double b = mass_ratio_bound(phi, xig, m, eps);
    verify(phi, b);
    // and it is essentially the largest admissible value
    bool fails = false;
    const double b2 = b * (1.0 + 1e-9);
    for (std::size_t j = 1; j < phi.size(); ++j)
      if (phi[j] > top * (b2 + 1.0 + eps) * xig[j] / (b2 + xig[j])) fails = true;
    CHECK(fails);
  }
  SUBCASE("preconditions") {
    std::vector<double> phi(xig.size(), top);
    CHECK_THROWS_AS(mass_ratio_bound(phi, xig, m, eps), InvalidInput);
    phi.assign(xig.size(), 0.0);
    phi.back() = 2.0 * top;
    CHECK_THROWS_AS(mass_ratio_bound(phi, xig, m, eps), InvalidInput);
  }
}

TEST_CASE("subcritical supersolution") {
  const ModelParams p(1.0, 1.0, 4.0 * kPi);
  const auto g = RadialGrid::uniform(256);
  const auto d = concentrated_data(g, p.m);
  const auto xig = XiGrid::uniform(257);
  const auto ctx = make_context(p, d.w0, xig);
  std::vector<double> times;
  std::vector<std::vector<double>> hist;
  PrimalConfig cfg;
  cfg.dt = 0.05;
  cfg.t_end = 20.0;
  cfg.record_every = 0.5;
  run_transformed(mass_function(d.u0, xig), xig, ctx, cfg, [&](const MassState& s) {
    times.push_back(s.t);
    hist.push_back(s.U);
  });
  const auto sb = supersolution_bound(p, d.w0.max(), times, hist, xig);
  CHECK(sb.eps == doctest::Approx(0.5));
  CHECK(p.m / (kPi * p.delta) * (1.0 + sb.eps) == doctest::Approx(6.0));
  CHECK(sb.C >= sb.a);
  CHECK(sb.a == doctest::Approx(p.m / (2.0 * kPi) * (sb.b + 1.0 + sb.eps)));
  CHECK(8.0 >= 6.0 + 2.0 * d.w0.max() * std::exp(-sb.t0));

  const auto xs = log_samples(1e-6, 1.0, 60);
  const auto ts = linear_samples(sb.t0, 50.0, 40);
  const auto rep = certify_supersolution(sb, ctx, xs, ts);
  CHECK(rep.passed);

  CHECK_THROWS_AS(supersolution_bound(ModelParams(1.0, 1.0, 8.0 * kPi), 1.0, times, hist, xig), RegimeError);
}

TEST_CASE("trajectory ordering checks") {
  const auto xig = XiGrid::uniform(5);
  UHistory a{{0.0, 1.0}, {{0, 0.1, 0.2, 0.3, 1.0}, {0, 0.2, 0.3, 0.4, 1.0}}};
  const auto same = compare_trajectories(a, a, xig, 2.0 * kPi);
  CHECK(same.passed);
  CHECK(same.max_violation == 0.0);
  UHistory b = a;
  b.U[1][2] = 0.25;
  const auto rep = compare_trajectories(a, b, xig, 2.0 * kPi);
  CHECK_FALSE(rep.passed);
  CHECK(rep.max_violation == doctest::Approx(0.05));
  CHECK(rep.at_xi == 0.5);
  CHECK(rep.at_t == 1.0);
  CHECK_THROWS_AS(compare_trajectories(a, b, XiGrid::uniform(7), 1.0), InvalidInput);
  b.times[1] = 2.0;
  CHECK_THROWS_AS(compare_trajectories(a, b, xig, 1.0), InvalidInput);
}

TEST_CASE("sign certificates on the recipe barrier") {
  const double m = 12.0 * kPi;
  const auto c = grow_up_constants(m, 1.0, kUnit);
  const auto d = build_grow_up_data(c, kUnit, RadialGrid::uniform(4096), 1.0);
  const auto ctx = make_context(kUnit, d.w0, XiGrid::uniform(3));
  const auto& s = c.barrier;
  const auto outer = certify_barrier(BarrierReport::Region::outer, s, ctx, linear_samples(s.xi0 * 1.0001, 0.9999, 30),
                                     linear_samples(0.5, 50.0, 30));
  CHECK(outer.passed);
  CHECK(outer.sample_count == 900);
  const auto inner = certify_barrier(BarrierReport::Region::inner, s, ctx, log_samples(1e-10, s.xi0 * 0.9999, 30),
                                     linear_samples(0.01, 50.0, 30));
  CHECK(inner.passed);
  CHECK(inner.max_residual <= 1e-12);
}
