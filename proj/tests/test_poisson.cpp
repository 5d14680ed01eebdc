#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nbch/grid.hpp"
#include "nbch/inequalities.hpp"
#include "nbch/norms.hpp"
#include "nbch/operators.hpp"
#include "nbch/poisson.hpp"

using namespace nbch;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField noise(const GridSpec& g, std::uint64_t seed) {
  ScalarField f(g);
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < g.size(); ++k)
    f.data()[k] = (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 0.5;
  return f;
}

double max_abs(const ScalarField& a) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::fabs(a.data()[k]));
  return m;
}

double residual_poisson(const ScalarField& psi, const ScalarField& rhs) {
  const ScalarField lp = laplacian(psi);
  double r = 0.0;
  for (std::size_t k = 0; k < lp.size(); ++k)
    r = std::max(r, std::fabs(lp.data()[k] - rhs.data()[k]));
  return r;
}

}  // namespace

TEST_CASE("poisson residual stays below 1e-10 relative on random data") {
  for (std::size_t n : {31, 64, 127}) {
    const GridSpec g = make_grid(1.9, 1.2, n, n + 2);
    const SolverPlan plan(g);
    for (std::uint64_t s : {1ull, 2ull}) {
      const ScalarField rhs = noise(g, s);
      const ScalarField psi = solve_poisson(plan, rhs);
      CHECK(residual_poisson(psi, rhs) < 1e-10 * max_abs(rhs));
    }
  }
}

TEST_CASE("helmholtz residual stays below 1e-10 relative") {
  const GridSpec g = make_grid(2.4, 0.9, 95, 63);
  const SolverPlan plan(g);
  const double a = 1.7, b = 0.31;
  const ScalarField rhs = noise(g, 3);
  const ScalarField w = solve_helmholtz(plan, a, b, rhs);
  const ScalarField lw = laplacian(w);
  double r = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k)
    r = std::max(r, std::fabs(a * w.data()[k] - b * lw.data()[k] - rhs.data()[k]));
  CHECK(r < 1e-10 * max_abs(rhs));
}

TEST_CASE("principal eigenmode inverts analytically") {
  const GridSpec g = make_grid(kPi, kPi / 2.0, 63, 63);
  const SolverPlan plan(g);
  const double mu = mu1_h(g);
  const ScalarField e = eigenmode_field(g);

  // lap psi = e  =>  psi = -e / mu1_h on the exact discrete eigenvector.
  const ScalarField psi = solve_poisson(plan, e);
  double worst = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k)
    worst = std::max(worst, std::fabs(psi.data()[k] + e.data()[k] / mu));
  CHECK(worst < 1e-13);

  // (a - b lap) w = e  =>  w = e / (a + b mu1_h).
  const double a = 2.0, b = 0.5;
  const ScalarField w = solve_helmholtz(plan, a, b, e);
  worst = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k)
    worst = std::max(worst, std::fabs(w.data()[k] - e.data()[k] / (a + b * mu)));
  CHECK(worst < 1e-13);
}

TEST_CASE("inverse laplacian is self-adjoint and negative") {
  const GridSpec g = make_grid(1.3, 0.7, 47, 41);
  const SolverPlan plan(g);
  const ScalarField a = noise(g, 4), b = noise(g, 5);
  const ScalarField ia = solve_poisson(plan, a), ib = solve_poisson(plan, b);
  const double lhs = inner_product(ia, b), rhs = inner_product(a, ib);
  CHECK(std::fabs(lhs - rhs) < 1e-12 * (std::fabs(lhs) + std::fabs(rhs)));
  CHECK(inner_product(ia, a) < 0.0);
}

TEST_CASE("helmholtz with b = 0 short-circuits to exact division") {
  const GridSpec g = make_grid(1.0, 1.0, 33, 35);
  const SolverPlan plan(g);
  const ScalarField rhs = noise(g, 6);
  const double a = 3.7;
  const ScalarField w = solve_helmholtz(plan, a, 0.0, rhs);
  for (std::size_t k = 0; k < w.size(); ++k)
    CHECK(w.data()[k] == rhs.data()[k] / a);
}

TEST_CASE("power-of-two rhs scaling rescales the solution bitwise") {
  const GridSpec g = make_grid(1.6, 1.1, 63, 31);
  const SolverPlan plan(g);
  const ScalarField rhs = noise(g, 7);
  ScalarField rhs8(g);
  for (std::size_t k = 0; k < rhs.size(); ++k) rhs8.data()[k] = 8.0 * rhs.data()[k];
  const ScalarField p1 = solve_poisson(plan, rhs), p8 = solve_poisson(plan, rhs8);
  for (std::size_t k = 0; k < p1.size(); ++k)
    CHECK(p8.data()[k] == 8.0 * p1.data()[k]);
}

TEST_CASE("repeat solves through one workspace are bitwise stable") {
  const GridSpec g = make_grid(2.0, 1.0, 41, 29);
  const SolverPlan plan(g);
  PoissonWorkspace ws;
  const ScalarField rhs = noise(g, 8);
  ScalarField out1(g), out2(g);
  solve_poisson(plan, rhs, out1, ws);
  solve_helmholtz(plan, 1.0, 0.25, rhs, out2, ws);  // perturb workspace contents
  ScalarField out3(g);
  solve_poisson(plan, rhs, out3, ws);
  CHECK(out1 == out3);
}

TEST_CASE("lambda_x matches the closed-form sine eigenvalues") {
  const GridSpec g = make_grid(1.5, 1.0, 21, 17);
  const SolverPlan plan(g);
  const auto& lam = plan.lambda_x();
  REQUIRE(lam.size() == g.nx);
  for (std::size_t m = 0; m < g.nx; ++m) {
    const double s = std::sin(double(m + 1) * kPi / (2.0 * double(g.nx + 1)));
    CHECK(lam[m] == doctest::Approx(-4.0 / (g.dx * g.dx) * s * s).epsilon(1e-14));
    CHECK(lam[m] < 0.0);
  }
}

TEST_CASE("solver input validation") {
  const GridSpec g = make_grid(1.0, 1.0, 31, 31);
  const GridSpec other = make_grid(1.0, 1.0, 33, 31);
  const SolverPlan plan(g);
  const ScalarField bad(other), rhs(g);
  CHECK_THROWS_AS(solve_poisson(plan, bad), std::invalid_argument);
  CHECK_THROWS_AS(solve_helmholtz(plan, 0.0, 1.0, rhs), std::invalid_argument);
  CHECK_THROWS_AS(solve_helmholtz(plan, 1.0, -1.0, rhs), std::invalid_argument);
}
