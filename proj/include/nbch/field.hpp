#pragma once

#include <cstddef>
#include <vector>

#include "nbch/grid.hpp"

namespace nbch {

/// Scalar field on the interior nodes of a GridSpec.
/// at0() extends the field by zero outside the interior; all stencils read
/// through it, so the homogeneous Dirichlet condition is built into every
/// operator rather than stored as ghost rows.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& g) : grid_(g), v_(g.size(), 0.0) {}

  const GridSpec& grid() const { return grid_; }
  bool empty() const { return v_.empty(); }
  std::size_t size() const { return v_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return v_[grid_.idx(i, j)]; }
  double operator()(std::size_t i, std::size_t j) const { return v_[grid_.idx(i, j)]; }

  /// Boundary-as-zero read; i, j may lie anywhere.
  double at0(std::ptrdiff_t i, std::ptrdiff_t j) const {
    if (i < 0 || j < 0 || i >= std::ptrdiff_t(grid_.nx) || j >= std::ptrdiff_t(grid_.ny))
      return 0.0;
    return v_[std::size_t(j) * grid_.nx + std::size_t(i)];
  }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  double* row(std::size_t j) { return v_.data() + j * grid_.nx; }
  const double* row(std::size_t j) const { return v_.data() + j * grid_.nx; }

  void fill(double c) { v_.assign(v_.size(), c); }

  bool operator==(const ScalarField&) const = default;

 private:
  GridSpec grid_{};
  std::vector<double> v_;
};

/// Throws std::invalid_argument unless both fields live on the same grid.
void require_same_grid(const ScalarField& a, const ScalarField& b);

}  // namespace nbch
