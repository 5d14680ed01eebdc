#pragma once

#include <memory>
#include <vector>

#include "nbch/field.hpp"

namespace nbch {

/// Scratch buffers for one in-flight solve. A workspace must not be shared by
/// concurrent solves; reusing one across sequential solves avoids allocation
/// in the stepper's hot loop.
struct PoissonWorkspace {
  std::vector<double> coef;  // row-major sine coefficients
  std::vector<double> tcoef; // mode-major transpose
  std::vector<double> cp;    // per-mode elimination multipliers
};

/// Direct solver for operators of the form alpha*I + beta*lap on the interior
/// grid with boundary-as-zero convention: sine transform of each row in x
/// (exact diagonalization of the x second difference), then one tridiagonal
/// Dirichlet solve in y per x-mode, then the inverse transform.
///
/// Immutable after construction and shareable across threads; per-solve state
/// lives in the workspace.
class SolverPlan {
 public:
  explicit SolverPlan(const GridSpec& g);
  ~SolverPlan();
  SolverPlan(SolverPlan&&) noexcept;
  SolverPlan& operator=(SolverPlan&&) noexcept;
  SolverPlan(const SolverPlan&) = delete;
  SolverPlan& operator=(const SolverPlan&) = delete;

  const GridSpec& grid() const;
  /// Eigenvalues of the 1D x second-difference, strictly negative:
  /// lambda_m = -(4/dx^2) sin^2((m+1) pi / (2(nx+1))), m = 0..nx-1.
  const std::vector<double>& lambda_x() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  friend void solve_poisson(const SolverPlan&, const ScalarField&,
                            ScalarField&, PoissonWorkspace&);
  friend void solve_helmholtz(const SolverPlan&, double, double,
                              const ScalarField&, ScalarField&, PoissonWorkspace&);
};

/// Solves lap(psi) = rhs; residual <= 1e-10 * ||rhs||_inf in the max norm.
/// Note the orientation: the right-hand side is the vorticity itself, so
/// (solve_poisson(a), a) <= 0 for every a.
ScalarField solve_poisson(const SolverPlan& plan, const ScalarField& rhs);
void solve_poisson(const SolverPlan& plan, const ScalarField& rhs,
                   ScalarField& out, PoissonWorkspace& ws);

/// Solves (a*I - b*lap) w = rhs with a > 0, b >= 0. b = 0 short-circuits to
/// w = rhs / a exactly (bitwise: one division per node).
ScalarField solve_helmholtz(const SolverPlan& plan, double a, double b,
                            const ScalarField& rhs);
void solve_helmholtz(const SolverPlan& plan, double a, double b,
                     const ScalarField& rhs, ScalarField& out,
                     PoissonWorkspace& ws);

}  // namespace nbch
