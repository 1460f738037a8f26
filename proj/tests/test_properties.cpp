// Randomized checks of structural properties. Every generator is seeded, so
// failures reproduce exactly.

#include <algorithm>
#include <cmath>
#include <random>

#include "chemomass/comparison.hpp"
#include "chemomass/experiments.hpp"
#include "chemomass/primal_solver.hpp"
#include "chemomass/transformed_solver.hpp"
#include "doctest.h"

using namespace chemomass;

namespace {

GridPtr random_grid(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> w(0.2, 1.0);
  std::vector<double> f(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) f[i] = f[i - 1] + w(rng);
  for (auto& x : f) x /= f[n];
  f[n] = 1.0;
  return RadialGrid::from_faces(std::move(f));
}

RadialProfile random_density(std::mt19937_64& rng, const GridPtr& g) {
  std::uniform_real_distribution<double> amp(0.0, 3.0), ctr(0.0, 0.8), wid(0.05, 0.4);
  const double a1 = amp(rng), c1 = ctr(rng), w1 = wid(rng), a2 = amp(rng), c2 = ctr(rng), w2 = wid(rng);
  return RadialProfile::sample(g, [&](double r) {
    return 0.05 + a1 * std::exp(-std::pow((r - c1) / w1, 2)) + a2 * std::exp(-std::pow((r - c2) / w2, 2));
  });
}

}  // namespace

TEST_CASE("random grids tile the disk") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    const auto g = random_grid(rng, 10 + 37 * k);
    double s = 0.0;
    for (double a : g->areas()) s += a;
    CHECK(s == doctest::Approx(kPi).epsilon(1e-12));
  }
}

TEST_CASE("mass function is monotone and carries the total mass") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) {
    const auto g = random_grid(rng, 50 + 13 * k);
    const auto u = random_density(rng, g);
    const auto xig = XiGrid::uniform(17 + 11 * k);
    const auto U = mass_function(u, xig);
    CHECK(U.front() == 0.0);
    CHECK(2.0 * kPi * U.back() == doctest::Approx(integrate_disk(u)).epsilon(1e-10));
    for (std::size_t j = 0; j + 1 < U.size(); ++j) CHECK(U[j + 1] >= U[j]);
  }
}

TEST_CASE("elliptic solve meets the boundary and mean conditions") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const auto g = random_grid(rng, 40 + 9 * k);
    const auto w = random_density(rng, g);
    const double mu = integrate_disk(w) / kPi;
    const auto vf = solve_v(w, mu);
    CHECK(vf.vr.front() == 0.0);
    CHECK(vf.vr.back() == 0.0);
    // the outermost interior face already sees almost the full balance
    const double vmax = std::max(std::abs(vf.v.max()), std::abs(vf.v.min()));
    CHECK(std::abs(integrate_disk(vf.v)) <= 1e-10 * kPi * vmax);
  }
}

TEST_CASE("primal steps conserve mass and positivity") {
  std::mt19937_64 rng(4);
  const ModelParams p(1.0, 1.0, kPi);
  for (int k = 0; k < 10; ++k) {
    const auto g = random_grid(rng, 64);
    auto s = make_primal_state(random_density(rng, g), random_density(rng, g));
    const double m0 = integrate_disk(s.u);
    for (int step = 0; step < 100; ++step) {
      s = advance_primal(s, p, std::min(1e-3, max_stable_dt(s)));
      CHECK(s.u.min() >= -1e-12 * s.u.max());
    }
    CHECK(integrate_disk(s.u) == doctest::Approx(m0).epsilon(1e-12));
  }
}

TEST_CASE("barrier continuity for random parameters") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    SubsolutionSpec s;
    s.xi0 = 0.01 + 0.5 * U(rng);
    s.b0 = s.xi0 * s.xi0 * (0.01 + 0.9 * U(rng));
    s.alpha = 0.01 + U(rng);
    s.m = 1.0 + 50.0 * U(rng);
    const double t = 20.0 * U(rng);
    const double below = ubar_eval(s, s.xi0, t);
    const double q = s.b(t) + s.xi0;
    const double above = (s.a(t) * s.b(t) * s.xi0 + s.a(t) * s.xi0 * s.xi0) / (q * q);
    CHECK(below == doctest::Approx(above).epsilon(1e-14));
    CHECK(ubar_xi(s, s.xi0, t) == doctest::Approx(s.a(t) * s.b(t) / (q * q)).epsilon(1e-12));
    CHECK(ubar_eval(s, 1.0, t) == doctest::Approx(s.m / (2.0 * kPi)).epsilon(1e-14));
    CHECK(outer_drift_direct(s, 0.5 * (1.0 + s.xi0), t) ==
          doctest::Approx(outer_drift_identity(s, 0.5 * (1.0 + s.xi0), t)).epsilon(1e-12));
  }
}

TEST_CASE("mass ratio bound certifies itself") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto xig = XiGrid::uniform(301);
  for (int k = 0; k < 30; ++k) {
    const double m = 1.0 + 20.0 * U(rng), top = m / (2.0 * kPi), eps = 0.05 + U(rng);
    const double slope = 1.0 + 200.0 * U(rng);
    std::vector<double> phi(xig.size());
    for (std::size_t j = 0; j < phi.size(); ++j) phi[j] = top * std::min(1.0, slope * xig[j] / (1.0 + slope * xig[j]) * (1.0 + 1.0 / slope));
    phi.back() = top;
    const double b = mass_ratio_bound(phi, xig, m, eps);
    CHECK(b > 0.0);
    CHECK(b < 1.0);
    for (std::size_t j = 0; j < phi.size(); ++j) CHECK(phi[j] <= top * (b + 1.0 + eps) * xig[j] / (b + xig[j]));
  }
}

TEST_CASE("transformed stepping preserves order and monotonicity") {
  std::mt19937_64 rng(7);
  const ModelParams p(1.0, 1.0, 6.0 * kPi);
  const auto g = RadialGrid::uniform(128);
  const auto xig = XiGrid::uniform(129);
  for (int k = 0; k < 5; ++k) {
    const auto ctx = make_context(p, random_density(rng, g), xig);
    auto norm = [&](RadialProfile u) {
      const double s = p.m / integrate_disk(u);
      for (auto& x : u.mutable_values()) x *= s;
      return mass_function(u, xig);
    };
    const auto Ua = norm(random_density(rng, g)), Ub = norm(random_density(rng, g));
    std::vector<double> lo(Ua.size()), hi(Ua.size());
    for (std::size_t j = 0; j < lo.size(); ++j) {
      lo[j] = std::min(Ua[j], Ub[j]);
      hi[j] = std::max(Ua[j], Ub[j]);
    }
    auto a = make_mass_state(lo, xig, ctx), b = make_mass_state(hi, xig, ctx);
    for (int step = 0; step < 200; ++step) {
      a = step_transformed(a, xig, ctx, 0.02);
      b = step_transformed(b, xig, ctx, 0.02);
    }
    for (std::size_t j = 0; j < lo.size(); ++j) {
      CHECK(a.U[j] <= b.U[j] + 1e-8 * p.m);
      if (j + 1 < lo.size()) CHECK(a.U[j + 1] - a.U[j] >= -1e-10 * p.m);
    }
  }
}
