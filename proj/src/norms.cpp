#include "nbch/norms.hpp"

#include <cmath>
#include <stdexcept>

#include "nbch/reduce.hpp"

namespace nbch {

double inner_product(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  const GridSpec& g = a.grid();
  const double s = rows_sum(g.ny, [&](std::size_t j) {
    const double* ra = a.row(j);
    const double* rb = b.row(j);
    return pairwise_sum(0, g.nx, [&](std::size_t i) { return ra[i] * rb[i]; });
  });
  return s * g.dx * g.dy;
}

double l2_norm(const ScalarField& a) { return std::sqrt(inner_product(a, a)); }

double h1_seminorm(const ScalarField& a) {
  const GridSpec& g = a.grid();
  // x gaps: nx+1 per row, boundary jumps included.
  const double sx = rows_sum(g.ny, [&](std::size_t j) {
    return pairwise_sum(0, g.nx + 1, [&](std::size_t i) {
      const double d = a.at0(std::ptrdiff_t(i), std::ptrdiff_t(j)) -
                       a.at0(std::ptrdiff_t(i) - 1, std::ptrdiff_t(j));
      return d * d;
    });
  });
  // y gaps: ny+1 "gap rows".
  const double sy = rows_sum(g.ny + 1, [&](std::size_t j) {
    return pairwise_sum(0, g.nx, [&](std::size_t i) {
      const double d = a.at0(std::ptrdiff_t(i), std::ptrdiff_t(j)) -
                       a.at0(std::ptrdiff_t(i), std::ptrdiff_t(j) - 1);
      return d * d;
    });
  });
  return std::sqrt(sx * (g.dy / g.dx) + sy * (g.dx / g.dy));
}

double lp_norm(const ScalarField& a, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const GridSpec& g = a.grid();
  auto accumulate = [&](auto&& term) {
    return rows_sum(g.ny, [&](std::size_t j) {
      const double* r = a.row(j);
      return pairwise_sum(0, g.nx, [&](std::size_t i) { return term(r[i]); });
    });
  };
  const double w = g.dx * g.dy;
  if (p == 1.0) return accumulate([](double v) { return std::fabs(v); }) * w;
  if (p == 2.0) return std::sqrt(accumulate([](double v) { return v * v; }) * w);
  if (p == 4.0)
    // Nested square roots keep power-of-two homogeneity exact.
    return std::sqrt(std::sqrt(accumulate([](double v) {
                       const double q = v * v;
                       return q * q;
                     }) * w));
  if (p == 6.0)
    return std::cbrt(std::sqrt(accumulate([](double v) {
             const double q = v * v;
             return q * q * q;
           }) * w));
  const double s = accumulate([&](double v) { return std::pow(std::fabs(v), p); });
  return std::pow(s * w, 1.0 / p);
}

}  // namespace nbch
