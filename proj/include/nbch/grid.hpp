#pragma once

#include <cstddef>

namespace nbch {

/// Uniform interior grid for the channel (0,L) x (-Y,Y).
/// Only interior nodes are stored: node (i,j) sits at x = (i+1)*dx,
/// y = -Y + (j+1)*dy with dx = L/(nx+1), dy = 2Y/(ny+1). Every stencil read
/// outside the interior is zero (homogeneous Dirichlet on all four sides).
struct GridSpec {
  double L = 0.0;
  double Y = 0.0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  double dx = 0.0;
  double dy = 0.0;

  std::size_t size() const { return nx * ny; }
  /// Row-major storage, rows are y-levels: index = j*nx + i.
  std::size_t idx(std::size_t i, std::size_t j) const { return j * nx + i; }
  double x(std::size_t i) const { return double(i + 1) * dx; }
  double y(std::size_t j) const { return -Y + double(j + 1) * dy; }

  bool operator==(const GridSpec&) const = default;
};

/// Validates and derives spacings. Requires L, Y > 0 and nx, ny >= 3.
/// The fast Poisson solver runs a sine transform of length nx per row, so
/// nx+1 should be a product of small primes (nx = 31, 63, 127, 255, ...);
/// other sizes work but transform slower.
GridSpec make_grid(double L, double Y, std::size_t nx, std::size_t ny);

/// Smallest eigenvalue of -Laplacian on the grid's interior stencil
/// (sampled principal sine mode is an exact eigenvector):
///   mu1_h = (4/dx^2) sin^2(pi*dx/(2L)) + (4/dy^2) sin^2(pi*dy/(4Y)).
/// Converges to (pi/L)^2 + (pi/(2Y))^2 as the grid refines.
double mu1_h(const GridSpec& g);

}  // namespace nbch
