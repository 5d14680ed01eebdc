#include "nbch/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace nbch::ref {

namespace {

std::ptrdiff_t sp(std::size_t i) { return static_cast<std::ptrdiff_t>(i); }

}  // namespace

ScalarField laplacian(const ScalarField& a) {
  const GridSpec& g = a.grid();
  ScalarField out(g);
  const double ix2 = 1.0 / (g.dx * g.dx), iy2 = 1.0 / (g.dy * g.dy);
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i)
      out(i, j) = (a.at0(sp(i) + 1, sp(j)) - 2.0 * a(i, j) + a.at0(sp(i) - 1, sp(j))) * ix2 +
                  (a.at0(sp(i), sp(j) + 1) - 2.0 * a(i, j) + a.at0(sp(i), sp(j) - 1)) * iy2;
  return out;
}

ScalarField ddx(const ScalarField& a) {
  const GridSpec& g = a.grid();
  ScalarField out(g);
  const double s = 1.0 / (2.0 * g.dx);
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i)
      out(i, j) = (a.at0(sp(i) + 1, sp(j)) - a.at0(sp(i) - 1, sp(j))) * s;
  return out;
}

ScalarField ddy(const ScalarField& a) {
  const GridSpec& g = a.grid();
  ScalarField out(g);
  const double s = 1.0 / (2.0 * g.dy);
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i)
      out(i, j) = (a.at0(sp(i), sp(j) + 1) - a.at0(sp(i), sp(j) - 1)) * s;
  return out;
}

ScalarField ddx2(const ScalarField& a) {
  const GridSpec& g = a.grid();
  ScalarField out(g);
  const double s = 1.0 / (g.dx * g.dx);
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i)
      out(i, j) = (a.at0(sp(i) + 1, sp(j)) - 2.0 * a(i, j) + a.at0(sp(i) - 1, sp(j))) * s;
  return out;
}

ScalarField ddy2(const ScalarField& a) {
  const GridSpec& g = a.grid();
  ScalarField out(g);
  const double s = 1.0 / (g.dy * g.dy);
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i)
      out(i, j) = (a.at0(sp(i), sp(j) + 1) - 2.0 * a(i, j) + a.at0(sp(i), sp(j) - 1)) * s;
  return out;
}

ScalarField jacobian(const ScalarField& u, const ScalarField& v) {
  require_same_grid(u, v);
  const GridSpec& g = u.grid();
  ScalarField out(g);
  const double s = 1.0 / (12.0 * g.dx * g.dy);
  // J(u,v) = u_y v_x - u_x v_y, i.e. the standard bracket J(p,q) = p_x q_y -
  // p_y q_x applied to p = v, q = u. Three-term Arakawa average, each term
  // spelled out.
  for (std::size_t jj = 0; jj < g.ny; ++jj) {
    for (std::size_t ii = 0; ii < g.nx; ++ii) {
      const std::ptrdiff_t i = sp(ii), j = sp(jj);
      auto p = [&](std::ptrdiff_t a_, std::ptrdiff_t b_) { return v.at0(a_, b_); };
      auto q = [&](std::ptrdiff_t a_, std::ptrdiff_t b_) { return u.at0(a_, b_); };
      const double j1 =
          (p(i + 1, j) - p(i - 1, j)) * (q(i, j + 1) - q(i, j - 1)) -
          (p(i, j + 1) - p(i, j - 1)) * (q(i + 1, j) - q(i - 1, j));
      const double j2 =
          p(i + 1, j) * (q(i + 1, j + 1) - q(i + 1, j - 1)) -
          p(i - 1, j) * (q(i - 1, j + 1) - q(i - 1, j - 1)) -
          p(i, j + 1) * (q(i + 1, j + 1) - q(i - 1, j + 1)) +
          p(i, j - 1) * (q(i + 1, j - 1) - q(i - 1, j - 1));
      const double j3 =
          q(i, j + 1) * (p(i + 1, j + 1) - p(i - 1, j + 1)) -
          q(i, j - 1) * (p(i + 1, j - 1) - p(i - 1, j - 1)) -
          q(i + 1, j) * (p(i + 1, j + 1) - p(i + 1, j - 1)) +
          q(i - 1, j) * (p(i - 1, j + 1) - p(i - 1, j - 1));
      out(ii, jj) = (j1 + j2 + j3) * s;
    }
  }
  return out;
}

double inner_product(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  const GridSpec& g = a.grid();
  double acc = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) acc += a.data()[k] * b.data()[k];
  return acc * g.dx * g.dy;
}

double l2_norm(const ScalarField& a) { return std::sqrt(inner_product(a, a)); }

double h1_seminorm(const ScalarField& a) {
  const GridSpec& g = a.grid();
  double sx = 0.0, sy = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i <= g.nx; ++i) {
      const double d = a.at0(sp(i), sp(j)) - a.at0(sp(i) - 1, sp(j));
      sx += d * d;
    }
  for (std::size_t j = 0; j <= g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double d = a.at0(sp(i), sp(j)) - a.at0(sp(i), sp(j) - 1);
      sy += d * d;
    }
  return std::sqrt(sx * g.dy / g.dx + sy * g.dx / g.dy);
}

double tail_mass(const State& s, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("ref::tail_mass: k must be > 0");
  const GridSpec& g = s.xi.grid();
  double acc = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j) {
    const double r = std::fabs(s.xi.grid().y(j) * s.xi.grid().y(j) / (k * k));
    double phi;
    if (r <= 1.0)
      phi = 0.0;
    else if (r >= 2.0)
      phi = 1.0;
    else {
      const double tau = r - 1.0;
      phi = ((6.0 * tau - 15.0) * tau + 10.0) * tau * tau * tau;
    }
    for (std::size_t i = 0; i < g.nx; ++i)
      acc += phi * phi * (s.xi(i, j) * s.xi(i, j) + s.theta(i, j) * s.theta(i, j));
  }
  return acc * g.dx * g.dy;
}

}  // namespace nbch::ref
