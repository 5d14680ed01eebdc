#include "nbch/poisson.hpp"

#include <fftw3.h>

#include <cmath>
#include <stdexcept>
#include <string>

namespace nbch {

namespace {

void check_finite(const ScalarField& rhs, const char* who) {
  const GridSpec& g = rhs.grid();
  const double* v = rhs.data();
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (!std::isfinite(v[idx])) {
      const std::size_t i = idx % g.nx, j = idx / g.nx;
      throw std::domain_error(std::string(who) + ": non-finite rhs at node (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }
}

void ensure_out(const GridSpec& g, ScalarField& out) {
  if (!(out.grid() == g)) out = ScalarField(g);
}

}  // namespace

struct SolverPlan::Impl {
  GridSpec g;
  std::vector<double> lambda;  // x second-difference eigenvalues, < 0
  fftw_plan plan = nullptr;    // 1D DST-I, out-of-place, unaligned-safe

  explicit Impl(const GridSpec& grid) : g(grid) {
    if (g.nx < 3 || g.ny < 3 || !(g.dx > 0.0) || !(g.dy > 0.0))
      throw std::invalid_argument("SolverPlan: degenerate grid");
    const double pi = 3.14159265358979323846;
    lambda.resize(g.nx);
    for (std::size_t m = 0; m < g.nx; ++m) {
      const double s = std::sin(double(m + 1) * pi / (2.0 * double(g.nx + 1)));
      lambda[m] = -4.0 / (g.dx * g.dx) * s * s;
    }
    // FFTW_ESTIMATE keeps planning deterministic; FFTW_UNALIGNED lets the
    // plan run on any buffer via the new-array interface.
    std::vector<double> in(g.nx), out(g.nx);
    plan = fftw_plan_r2r_1d(int(g.nx), in.data(), out.data(), FFTW_RODFT00,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw std::runtime_error("SolverPlan: sine-transform planning failed");
  }

  ~Impl() {
    if (plan) fftw_destroy_plan(plan);
  }

  // Solves (alpha*I + beta*lap) w = rhs. Every mode's tridiagonal system is
  // strictly diagonally dominant for the two uses (alpha=0, beta=1 and
  // alpha>0, beta<0), so the elimination never pivots.
  void solve(double alpha, double beta, const ScalarField& rhs,
             ScalarField& out, PoissonWorkspace& ws) const {
    const std::size_t nx = g.nx, ny = g.ny, n = nx * ny;
    ws.coef.resize(n);
    ws.tcoef.resize(n);
    ws.cp.resize(n);
    ensure_out(g, out);

    // Row transforms: unnormalized DST-I, length nx.
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < std::ptrdiff_t(ny); ++j)
      fftw_execute_r2r(plan, const_cast<double*>(rhs.row(std::size_t(j))),
                       ws.coef.data() + std::size_t(j) * nx);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t m = 0; m < std::ptrdiff_t(nx); ++m)
      for (std::size_t j = 0; j < ny; ++j)
        ws.tcoef[std::size_t(m) * ny + j] = ws.coef[j * nx + std::size_t(m)];

    const double ey = beta / (g.dy * g.dy);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t m = 0; m < std::ptrdiff_t(nx); ++m) {
      const double d = alpha + beta * lambda[std::size_t(m)] - 2.0 * ey;
      double* w = ws.tcoef.data() + std::size_t(m) * ny;
      double* cp = ws.cp.data() + std::size_t(m) * ny;
      double inv = 1.0 / d;
      cp[0] = ey * inv;
      w[0] *= inv;
      for (std::size_t j = 1; j < ny; ++j) {
        inv = 1.0 / (d - ey * cp[j - 1]);
        cp[j] = ey * inv;
        w[j] = (w[j] - ey * w[j - 1]) * inv;
      }
      for (std::size_t j = ny - 1; j-- > 0;) w[j] -= cp[j] * w[j + 1];
    }

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < std::ptrdiff_t(ny); ++j)
      for (std::size_t m = 0; m < nx; ++m)
        ws.coef[std::size_t(j) * nx + m] = ws.tcoef[m * ny + std::size_t(j)];

    // Inverse DST-I is the forward transform again; two applications scale
    // by 2(nx+1), hence the normalization here.
    const double s = 1.0 / (2.0 * double(nx + 1));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < std::ptrdiff_t(ny); ++j) {
      double* o = out.row(std::size_t(j));
      fftw_execute_r2r(plan, ws.coef.data() + std::size_t(j) * nx, o);
      for (std::size_t i = 0; i < nx; ++i) o[i] *= s;
    }
  }
};

SolverPlan::SolverPlan(const GridSpec& g) : impl_(std::make_unique<Impl>(g)) {}
SolverPlan::~SolverPlan() = default;
SolverPlan::SolverPlan(SolverPlan&&) noexcept = default;
SolverPlan& SolverPlan::operator=(SolverPlan&&) noexcept = default;

const GridSpec& SolverPlan::grid() const { return impl_->g; }
const std::vector<double>& SolverPlan::lambda_x() const { return impl_->lambda; }

void solve_poisson(const SolverPlan& plan, const ScalarField& rhs,
                   ScalarField& out, PoissonWorkspace& ws) {
  if (!(rhs.grid() == plan.grid()))
    throw std::invalid_argument("solve_poisson: rhs grid does not match plan");
  check_finite(rhs, "solve_poisson");
  plan.impl_->solve(0.0, 1.0, rhs, out, ws);
}

ScalarField solve_poisson(const SolverPlan& plan, const ScalarField& rhs) {
  ScalarField out;
  PoissonWorkspace ws;
  solve_poisson(plan, rhs, out, ws);
  return out;
}

void solve_helmholtz(const SolverPlan& plan, double a, double b,
                     const ScalarField& rhs, ScalarField& out,
                     PoissonWorkspace& ws) {
  if (!(a > 0.0)) throw std::invalid_argument("solve_helmholtz: a must be > 0");
  if (!(b >= 0.0)) throw std::invalid_argument("solve_helmholtz: b must be >= 0");
  if (!(rhs.grid() == plan.grid()))
    throw std::invalid_argument("solve_helmholtz: rhs grid does not match plan");
  check_finite(rhs, "solve_helmholtz");
  if (b == 0.0) {
    // Identity solve: exactly one division per node.
    const GridSpec& g = plan.grid();
    ensure_out(g, out);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < std::ptrdiff_t(g.ny); ++j) {
      const double* r = rhs.row(std::size_t(j));
      double* o = out.row(std::size_t(j));
      for (std::size_t i = 0; i < g.nx; ++i) o[i] = r[i] / a;
    }
    return;
  }
  plan.impl_->solve(a, -b, rhs, out, ws);
}

ScalarField solve_helmholtz(const SolverPlan& plan, double a, double b,
                            const ScalarField& rhs) {
  ScalarField out;
  PoissonWorkspace ws;
  solve_helmholtz(plan, a, b, rhs, out, ws);
  return out;
}

}  // namespace nbch
