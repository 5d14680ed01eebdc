#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "nbch/field.hpp"
#include "nbch/grid.hpp"
#include "nbch/inequalities.hpp"
#include "nbch/norms.hpp"
#include "nbch/reduce.hpp"
#include "nbch/reference.hpp"

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

}  // namespace

TEST_CASE("grid spacing and node coordinates") {
  const GridSpec g = make_grid(2.0, 1.5, 7, 5);
  CHECK(g.dx == doctest::Approx(2.0 / 8.0).epsilon(1e-15));
  CHECK(g.dy == doctest::Approx(3.0 / 6.0).epsilon(1e-15));
  CHECK(g.size() == 35);
  CHECK(g.idx(0, 0) == 0);
  CHECK(g.idx(6, 0) == 6);
  CHECK(g.idx(0, 1) == 7);
  CHECK(g.x(0) == doctest::Approx(g.dx));
  CHECK(g.x(6) == doctest::Approx(2.0 - g.dx));
  CHECK(g.y(0) == doctest::Approx(-1.5 + g.dy));
  CHECK(g.y(4) == doctest::Approx(1.5 - g.dy));
}

TEST_CASE("make_grid rejects bad parameters") {
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 8, 8), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1.0, -1.0, 8, 8), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1.0, 1.0, 2, 8), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1.0, 1.0, 8, 2), std::invalid_argument);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(make_grid(inf, 1.0, 8, 8), std::invalid_argument);
}

TEST_CASE("mu1_h matches the closed form and tends to the continuum value") {
  const GridSpec g = make_grid(kPi, kPi / 2.0, 31, 31);
  const double expect =
      4.0 / (g.dx * g.dx) * std::pow(std::sin(kPi * g.dx / (2.0 * g.L)), 2) +
      4.0 / (g.dy * g.dy) * std::pow(std::sin(kPi * g.dy / (4.0 * g.Y)), 2);
  CHECK(mu1_h(g) == doctest::Approx(expect).epsilon(1e-15));

  // Continuum limit (pi/L)^2 + (pi/2Y)^2 = 2 at second order in h.
  const double c31 = std::fabs(mu1_h(g) - 2.0);
  const GridSpec g2 = make_grid(kPi, kPi / 2.0, 63, 63);
  const double c63 = std::fabs(mu1_h(g2) - 2.0);
  CHECK(c63 < c31 / 3.5);
  CHECK(c63 < 5e-4);
}

TEST_CASE("field ghost reads are zero and rows are contiguous") {
  const GridSpec g = make_grid(1.0, 1.0, 5, 4);
  ScalarField f(g);
  f(2, 1) = 3.5;
  CHECK(f.at0(2, 1) == 3.5);
  CHECK(f.at0(-1, 1) == 0.0);
  CHECK(f.at0(5, 1) == 0.0);
  CHECK(f.at0(2, -1) == 0.0);
  CHECK(f.at0(2, 4) == 0.0);
  CHECK(f.row(1)[2] == 3.5);
  CHECK(f.data() + g.idx(0, 2) == f.row(2));
}

TEST_CASE("require_same_grid rejects mismatched fields") {
  ScalarField a(make_grid(1.0, 1.0, 5, 5)), b(make_grid(1.0, 1.0, 5, 6));
  CHECK_THROWS_AS(require_same_grid(a, b), std::invalid_argument);
}

TEST_CASE("pairwise_sum agrees with a compensated serial sum") {
  std::mt19937_64 rng(11);
  std::vector<double> v(10001);
  for (double& x : v) x = (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 0.5;

  // Kahan reference, written independently of the production reduction.
  double s = 0.0, c = 0.0;
  for (double x : v) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  const double p = pairwise_sum(0, v.size(), [&](std::size_t i) { return v[i]; });
  CHECK(p == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("reductions are bitwise reproducible across thread counts") {
  const GridSpec g = make_grid(2.0, 1.0, 65, 33);
  const ScalarField a = noise(g, 3), b = noise(g, 4);
  omp_set_num_threads(1);
  const double ip1 = inner_product(a, b);
  const double h1a = h1_seminorm(a);
  omp_set_num_threads(2);
  const double ip2 = inner_product(a, b);
  const double h2a = h1_seminorm(a);
  omp_set_num_threads(1);
  CHECK(ip1 == ip2);
  CHECK(h1a == h2a);
}

// Lattice identities behind the eigenmode oracles, for n >= 3:
//   sum sin^2(i pi/(n+1)) = (n+1)/2      sum sin^4 = 3(n+1)/8
//   sum sin^6 = 5(n+1)/16                sum sin(i pi/(n+1)) = cot(pi/(2(n+1)))
TEST_CASE("eigenmode norms hit their closed forms") {
  const double L = kPi, Y = kPi / 2.0;
  const GridSpec g = make_grid(L, Y, 47, 23);
  const ScalarField e = eigenmode_field(g);

  const double area = L * Y;  // = L * 2Y / 2
  CHECK(l2_norm(e) * l2_norm(e) == doctest::Approx(area / 2.0).epsilon(1e-13));
  CHECK(std::pow(lp_norm(e, 4.0), 4) ==
        doctest::Approx(9.0 * area / 32.0).epsilon(1e-13));
  CHECK(std::pow(lp_norm(e, 6.0), 6) ==
        doctest::Approx(25.0 * area / 128.0).epsilon(1e-13));
  const double l1 = g.dx * g.dy / (std::tan(kPi / (2.0 * (g.nx + 1))) *
                                   std::tan(kPi / (2.0 * (g.ny + 1))));
  CHECK(lp_norm(e, 1.0) == doctest::Approx(l1).epsilon(1e-13));

  // The sampled mode is an exact discrete eigenvector, so the gap-based
  // seminorm satisfies the sharp Poincare identity.
  const double h1 = h1_seminorm(e);
  CHECK(h1 * h1 == doctest::Approx(mu1_h(g) * area / 2.0).epsilon(1e-13));
}

TEST_CASE("norms match the serial reference implementations") {
  const GridSpec g = make_grid(1.7, 0.9, 33, 29);
  const ScalarField a = noise(g, 5), b = noise(g, 6);
  CHECK(inner_product(a, b) == doctest::Approx(ref::inner_product(a, b)).epsilon(1e-13));
  CHECK(l2_norm(a) == doctest::Approx(ref::l2_norm(a)).epsilon(1e-13));
  CHECK(h1_seminorm(a) == doctest::Approx(ref::h1_seminorm(a)).epsilon(1e-13));
}

TEST_CASE("lp_norm special cases") {
  const GridSpec g = make_grid(1.0, 1.0, 9, 9);
  ScalarField f(g);
  f.fill(-2.0);
  const double cell = g.dx * g.dy;
  const double n = static_cast<double>(g.size());
  CHECK(lp_norm(f, 1.0) == doctest::Approx(2.0 * n * cell).epsilon(1e-14));
  CHECK(lp_norm(f, 2.0) == doctest::Approx(std::sqrt(4.0 * n * cell)).epsilon(1e-14));
  CHECK(lp_norm(f, 3.0) ==
        doctest::Approx(std::cbrt(8.0 * n * cell)).epsilon(1e-14));
  CHECK(lp_norm(f, 2.0) == doctest::Approx(l2_norm(f)).epsilon(1e-15));
  CHECK_THROWS_AS(lp_norm(f, 0.5), std::invalid_argument);
}

TEST_CASE("power-of-two scaling of norms is bitwise exact") {
  const GridSpec g = make_grid(2.0, 1.0, 21, 17);
  const ScalarField a = noise(g, 9);
  ScalarField a4(g);
  for (std::size_t k = 0; k < g.size(); ++k) a4.data()[k] = 4.0 * a.data()[k];
  CHECK(l2_norm(a4) == 4.0 * l2_norm(a));
  CHECK(h1_seminorm(a4) == 4.0 * h1_seminorm(a));
  CHECK(lp_norm(a4, 4.0) == 4.0 * lp_norm(a, 4.0));
}
