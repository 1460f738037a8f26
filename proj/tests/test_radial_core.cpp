#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "chemomass/errors.hpp"
#include "chemomass/radial_core.hpp"
#include "doctest.h"

using namespace chemomass;

namespace {

// 2 pi int_a^b r f(r) dr by adaptive quadrature, used as an oracle for the
// annulus sums.
template <class F>
double disk_oracle(F f, double a = 0.0, double b = 1.0) {
  auto g = [&](double r) { return 2.0 * kPi * r * f(r); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, a, b, 15, 1e-14);
}

}  // namespace

TEST_CASE("grid areas add up to the disk") {
  for (std::size_t n : {1u, 7u, 512u, 4096u}) {
    const auto g = RadialGrid::uniform(n);
    double s = 0.0;
    for (double a : g->areas()) s += a;
    CHECK(s == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(g->faces().front() == 0.0);
    CHECK(g->faces().back() == 1.0);
  }
}

TEST_CASE("grids reject malformed faces") {
  CHECK_THROWS_AS(RadialGrid::from_faces({0.0, 0.5, 0.5, 1.0}), InvalidInput);
  CHECK_THROWS_AS(RadialGrid::from_faces({0.1, 1.0}), InvalidInput);
  CHECK_THROWS_AS(RadialGrid::from_faces({0.0, 0.9}), InvalidInput);
  CHECK_THROWS_AS(RadialGrid::uniform(0), InvalidInput);
}

TEST_CASE("profiles reject non-finite samples") {
  const auto g = RadialGrid::uniform(4);
  CHECK_THROWS_AS(RadialProfile(g, {1.0, NAN, 1.0, 1.0}), InvalidInput);
  CHECK_THROWS_AS(RadialProfile(g, {1.0, 1.0}), InvalidInput);
}

TEST_CASE("profile interpolation between centers") {
  const auto g = RadialGrid::uniform(4);  // centers 1/8, 3/8, 5/8, 7/8
  RadialProfile f(g, {0.0, 1.0, 2.0, 3.0});
  CHECK(f.at(0.0) == 0.0);
  CHECK(f.at(0.25) == doctest::Approx(0.5));
  CHECK(f.at(0.5) == doctest::Approx(1.5));
  CHECK(f.at(1.0) == 3.0);
}

TEST_CASE("integrate_disk") {
  const auto g = RadialGrid::uniform(64);
  CHECK(integrate_disk(RadialProfile::constant(g, 1.0)) == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(integrate_disk(RadialProfile::constant(g, 2.0)) == doctest::Approx(2.0 * kPi).epsilon(1e-14));

  auto f = [](double r) { return 4.0 * (1.0 - r * r); };
  const double exact = disk_oracle(f);
  CHECK(exact == doctest::Approx(2.0 * kPi).epsilon(1e-13));
  const double e1 = std::abs(integrate_disk(RadialProfile::sample(RadialGrid::uniform(64), f)) - exact);
  const double e2 = std::abs(integrate_disk(RadialProfile::sample(RadialGrid::uniform(128), f)) - exact);
  CHECK(e1 < 1e-3);
  CHECK(e1 / e2 >= 3.5);
}

TEST_CASE("midpoint rule is second order on smooth profiles") {
  auto f = [](double r) { return std::exp(-3.0 * r * r) * (1.0 + std::cos(4.0 * r)); };
  const double exact = disk_oracle(f);
  double prev = 0.0;
  for (std::size_t n : {32u, 64u, 128u, 256u}) {
    const double e = std::abs(integrate_disk(RadialProfile::sample(RadialGrid::uniform(n), f)) - exact);
    if (prev > 0.0) CHECK(prev / e >= 3.5);
    prev = e;
  }
}

TEST_CASE("mass_function of a uniform density is linear") {
  const double m = 4.0 * kPi;
  const auto g = RadialGrid::uniform(100);
  const auto xig = XiGrid::uniform(65);
  const auto U = mass_function(RadialProfile::constant(g, m / kPi), xig);
  for (std::size_t j = 0; j < xig.size(); ++j) CHECK(U[j] == doctest::Approx(m * xig[j] / (2.0 * kPi)).epsilon(1e-14));
  CHECK(U.front() == 0.0);
}

TEST_CASE("mass_function of concentrated data is flat beyond the support") {
  const double m = 3.0;
  const auto g = RadialGrid::uniform(200);  // r = 0.1 is a face
  auto u = RadialProfile::sample(g, [](double r) { return r < 0.1 ? 1.0 + std::cos(20.0 * r) : 0.0; });
  const double s = m / integrate_disk(u);
  for (auto& x : u.mutable_values()) x *= s;
  // independent oracle: the annulus sum of the rescaled profile inside r < 0.1
  double inner = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (g->centers()[i] < 0.1) inner += g->areas()[i] * u[i];
  CHECK(inner / (2.0 * kPi) == doctest::Approx(m / (2.0 * kPi)).epsilon(1e-13));
  const auto xig = XiGrid::uniform(101);
  const auto U = mass_function(u, xig);
  for (std::size_t j = 0; j < xig.size(); ++j)
    if (xig[j] >= 0.01) CHECK(U[j] == doctest::Approx(m / (2.0 * kPi)).epsilon(1e-12));
}

TEST_CASE("mass function is exact between knots") {
  const auto g = RadialGrid::uniform(16);
  auto f = [](double r) { return 1.0 + r; };
  const auto u = RadialProfile::sample(g, f);
  MassFunction M(u);
  // piecewise constant oracle: int_0^sqrt(xi) r u(r) dr cell by cell
  for (double xi : {0.003, 0.2, 0.5, 0.77, 0.999}) {
    const double R = std::sqrt(xi);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double a = g->faces()[i], b = std::min(g->faces()[i + 1], R);
      if (b <= a) break;
      s += u[i] * 0.5 * (b * b - a * a);
    }
    CHECK(M(xi) == doctest::Approx(s).epsilon(1e-13));
  }
  CHECK(M.total() * 2.0 * kPi == doctest::Approx(integrate_disk(u)).epsilon(1e-14));
  CHECK(M.slope(0.3) == doctest::Approx(0.5 * u[static_cast<std::size_t>(std::sqrt(0.3) * 16)]));
}

TEST_CASE("mass_function requires a nonnegative density") {
  const auto g = RadialGrid::uniform(4);
  CHECK_THROWS_AS(mass_function(RadialProfile(g, {1.0, -1.0, 1.0, 1.0}), XiGrid::uniform(5)), InvalidInput);
}

TEST_CASE("w0_moments") {
  const auto g = RadialGrid::uniform(64);
  const auto xig = XiGrid::uniform(33);
  SUBCASE("zero") {
    const auto mom = w0_moments(RadialProfile::constant(g, 0.0), xig);
    CHECK(mom.kappa0 == 0.0);
    for (double x : mom.W0) CHECK(x == 0.0);
  }
  SUBCASE("uniform") {
    const double c = 2.5;
    const auto mom = w0_moments(RadialProfile::constant(g, c), xig);
    CHECK(mom.kappa0 == doctest::Approx(c / 2.0).epsilon(1e-14));
    for (std::size_t j = 0; j < xig.size(); ++j) CHECK(mom.W0[j] == doctest::Approx(c * xig[j] / 2.0).epsilon(1e-14));
  }
  SUBCASE("indicator of the half disk") {
    const auto w = RadialProfile::sample(g, [](double r) { return r < 0.5 ? 1.0 : 0.0; });
    const auto mom = w0_moments(w, xig);
    CHECK(mom.kappa0 == doctest::Approx(0.125).epsilon(1e-14));
    for (std::size_t j = 0; j < xig.size(); ++j) {
      const double oracle = disk_oracle([](double r) { return r < 0.5 ? 1.0 : 0.0; }, 0.0, std::sqrt(xig[j])) / (2.0 * kPi);
      CHECK(mom.W0[j] == doctest::Approx(std::min(xig[j], 0.25) / 2.0).epsilon(1e-13));
      CHECK(mom.W0[j] == doctest::Approx(oracle).epsilon(1e-6));
    }
  }
}

TEST_CASE("mu closed form") {
  const double m = 4.0 * kPi;
  SUBCASE("decaying kernel from zero data") {
    const ModelParams p(1.0, 1.0, m);
    for (double t : {0.1, 1.0, 7.0}) CHECK(mu_closed_form(p, 0.0, t) == doctest::Approx(m / kPi * (1.0 - std::exp(-t))));
  }
  SUBCASE("no decay") {
    const ModelParams p(0.0, 1.0, m);
    for (double t : {0.1, 1.0, 7.0}) CHECK(mu_closed_form(p, 0.0, t) == doctest::Approx(m * t / kPi));
  }
  SUBCASE("initial value") {
    const ModelParams p(0.7, 2.0, m);
    CHECK(mu_closed_form(p, 5.0, 0.0) == doctest::Approx(5.0 / kPi));
    CHECK(w_mass_closed_form(p, 5.0, 0.0) == doctest::Approx(5.0));
  }
  SUBCASE("long-time limit") {
    const ModelParams p(2.0, 0.5, m);
    const double t = 50.0 * p.tau / p.delta;
    CHECK(mu_closed_form(p, 3.0, t) == doctest::Approx(m / (kPi * p.delta)).epsilon(1e-6));
  }
  CHECK_THROWS_AS(mu_closed_form(ModelParams(1.0, 1.0, m), 0.0, -1.0), InvalidInput);
}

TEST_CASE("model parameters") {
  const ModelParams p(1.5, 2.0, 3.0);
  CHECK(p.critical_mass() == 8.0 * kPi * 1.5);
  CHECK(p.kernel_rate() == 0.75);
  CHECK_THROWS_AS(ModelParams(1.0, 0.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(ModelParams(-1.0, 1.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(ModelParams(1.0, 1.0, 0.0), InvalidInput);
}

TEST_CASE("xi grids") {
  const auto u = XiGrid::uniform(9);
  CHECK(u[0] == 0.0);
  CHECK(u[8] == 1.0);
  const auto g = XiGrid::graded(1e-12, 1.2, 0.01);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 1e-12);
  CHECK(g[g.size() - 1] == 1.0);
  for (std::size_t j = 0; j + 1 < g.size(); ++j) CHECK(g.spacing(j) <= 0.0100001);
  CHECK_THROWS_AS(XiGrid({0.0, 0.5}), InvalidInput);
  CHECK_THROWS_AS(XiGrid({0.0, 0.6, 0.5, 1.0}), InvalidInput);
  CHECK_THROWS_AS(XiGrid::graded(0.0, 1.1, 0.01), InvalidInput);
}

TEST_CASE("profile and xi CSV output") {
  const auto g = RadialGrid::uniform(2);
  std::ostringstream os;
  write_profile_csv(os, RadialProfile(g, {1.0 / 3.0, 2.0}));
  CHECK(os.str() == "r,value\n0.25,0.33333333333333331\n0.75,2\n");
  std::ostringstream xs;
  const auto xig = XiGrid::uniform(3);
  const std::vector<double> v{0.0, 0.1, 1.0};
  write_xi_csv(xs, xig, v);
  CHECK(xs.str() == "xi,value\n0,0\n0.5,0.10000000000000001\n1,1\n");
}
