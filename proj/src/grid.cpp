#include "nbch/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "nbch/field.hpp"

namespace nbch {

GridSpec make_grid(double L, double Y, std::size_t nx, std::size_t ny) {
  if (!(L > 0.0) || !(Y > 0.0) || !std::isfinite(L) || !std::isfinite(Y))
    throw std::invalid_argument("make_grid: L and Y must be positive and finite");
  if (nx < 3 || ny < 3)
    throw std::invalid_argument("make_grid: nx and ny must be at least 3");
  GridSpec g;
  g.L = L;
  g.Y = Y;
  g.nx = nx;
  g.ny = ny;
  g.dx = L / double(nx + 1);
  g.dy = 2.0 * Y / double(ny + 1);
  return g;
}

double mu1_h(const GridSpec& g) {
  const double pi = 3.14159265358979323846;
  const double sx = std::sin(pi * g.dx / (2.0 * g.L));
  const double sy = std::sin(pi * g.dy / (4.0 * g.Y));
  return 4.0 / (g.dx * g.dx) * sx * sx + 4.0 / (g.dy * g.dy) * sy * sy;
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument("fields live on different grids");
}

}  // namespace nbch
