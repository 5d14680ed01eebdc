#include "nbch/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "nbch/operators.hpp"

namespace nbch {

namespace {

struct Scratch {
  PoissonWorkspace pw;
  ScalarField lap, rhs, Fxi, Fth, thx, jac;
};

void check_field_finite(const ScalarField& a, double t, const char* what) {
  const GridSpec& g = a.grid();
  const double* v = a.data();
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (!std::isfinite(v[idx])) {
      const std::size_t i = idx % g.nx, j = idx / g.nx;
      throw std::runtime_error(std::string(what) + " non-finite at node (" +
                               std::to_string(i) + "," + std::to_string(j) +
                               "), t=" + std::to_string(t));
    }
  }
}

void validate(const Params& p, double dt) {
  if (!(p.Pr > 0.0)) throw std::invalid_argument("params: Pr must be > 0");
  if (!(p.Ra >= 0.0)) throw std::invalid_argument("params: Ra must be >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("stepper: dt must be positive and finite");
}

void tendency_into(const State& s, const Params& p, bool advection,
                   Scratch& sc) {
  const GridSpec& g = s.xi.grid();
  if (!p.f.empty()) require_same_grid(p.f, s.xi);
  if (!p.g.empty()) require_same_grid(p.g, s.theta);
  if (!(sc.Fxi.grid() == g)) sc.Fxi = ScalarField(g);
  if (!(sc.Fth.grid() == g)) sc.Fth = ScalarField(g);

  ddx_into(s.theta, sc.thx);
  const double buoy = p.Ra / p.Pr;
  if (advection) jacobian_into(s.psi, s.xi, sc.jac);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < std::ptrdiff_t(g.ny); ++j) {
    double* F = sc.Fxi.row(std::size_t(j));
    const double* tx = sc.thx.row(std::size_t(j));
    const double* J = advection ? sc.jac.row(std::size_t(j)) : nullptr;
    const double* f = p.f.empty() ? nullptr : p.f.row(std::size_t(j));
    for (std::size_t i = 0; i < g.nx; ++i) {
      double v = -buoy * tx[i];
      if (J) v -= J[i];
      if (f) v += f[i];
      F[i] = v;
    }
  }

  if (advection) jacobian_into(s.psi, s.theta, sc.jac);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < std::ptrdiff_t(g.ny); ++j) {
    double* F = sc.Fth.row(std::size_t(j));
    const double* J = advection ? sc.jac.row(std::size_t(j)) : nullptr;
    const double* gf = p.g.empty() ? nullptr : p.g.row(std::size_t(j));
    for (std::size_t i = 0; i < g.nx; ++i) {
      double v = J ? -J[i] : 0.0;
      if (gf) v += gf[i];
      F[i] = v;
    }
  }

  check_field_finite(sc.Fxi, s.t, "explicit_tendency: vorticity tendency");
  check_field_finite(sc.Fth, s.t, "explicit_tendency: temperature tendency");
}

// One CNAB2 step of size dt. The tendencies are evaluated on entry, after
// which xi and theta may be overwritten in place.
void step_impl(State& s, const Params& p, const StepperConfig& cfg, double dt,
               StepperMemory& mem, const SolverPlan& plan, Scratch& sc) {
  validate(p, dt);
  tendency_into(s, p, cfg.advection, sc);

  bool ab2 = mem.valid;
  if (ab2 && std::fabs(dt - mem.dt_prev) > 0.1 * mem.dt_prev) {
    mem.clear();
    ab2 = false;
  }
  // Variable-step weights; exactly (3/2, -1/2) at uniform dt.
  const double r = ab2 ? dt / mem.dt_prev : 1.0;
  const double b1 = ab2 ? 1.0 + 0.5 * r : 1.0;
  const double b2 = ab2 ? -0.5 * r : 0.0;

  const GridSpec& g = s.xi.grid();
  if (!(sc.rhs.grid() == g)) sc.rhs = ScalarField(g);

  auto assemble = [&](const ScalarField& field, double half,
                      const ScalarField& F, const ScalarField& Fprev) {
    laplacian_into(field, sc.lap);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < std::ptrdiff_t(g.ny); ++j) {
      double* o = sc.rhs.row(std::size_t(j));
      const double* a = field.row(std::size_t(j));
      const double* l = sc.lap.row(std::size_t(j));
      const double* Fn = F.row(std::size_t(j));
      const double* Fp = ab2 ? Fprev.row(std::size_t(j)) : nullptr;
      for (std::size_t i = 0; i < g.nx; ++i) {
        const double expl = Fp ? (b1 * Fn[i] + b2 * Fp[i]) : Fn[i];
        o[i] = a[i] + half * l[i] + dt * expl;
      }
    }
  };

  const double half_xi = 0.5 * dt;
  assemble(s.xi, half_xi, sc.Fxi, mem.Fxi_prev);
  solve_helmholtz(plan, 1.0, half_xi, sc.rhs, s.xi, sc.pw);

  const double half_th = 0.5 * dt / p.Pr;
  assemble(s.theta, half_th, sc.Fth, mem.Ftheta_prev);
  solve_helmholtz(plan, 1.0, half_th, sc.rhs, s.theta, sc.pw);

  solve_poisson(plan, s.xi, s.psi, sc.pw);

  std::swap(mem.Fxi_prev, sc.Fxi);
  std::swap(mem.Ftheta_prev, sc.Fth);
  mem.dt_prev = dt;
  mem.valid = true;
  s.t += dt;

  check_field_finite(s.xi, s.t, "step: xi");
  check_field_finite(s.theta, s.t, "step: theta");
}

void notify(std::span<const Observer> observers, long n, const State& s) {
  for (const Observer& o : observers)
    if (o.fn && o.every > 0 && n % o.every == 0) o.fn(n, s);
}

}  // namespace

Tendencies explicit_tendency(const State& state, const Params& params) {
  validate(params, 1.0);
  Scratch sc;
  tendency_into(state, params, true, sc);
  return Tendencies{std::move(sc.Fxi), std::move(sc.Fth)};
}

State step(State state, const Params& params, const StepperConfig& cfg,
           StepperMemory& mem, const SolverPlan& plan) {
  Scratch sc;
  step_impl(state, params, cfg, cfg.dt, mem, plan, sc);
  return state;
}

double cfl_dt(const State& state, const StepperConfig& cfg) {
  if (!(cfg.cfl_target > 0.0 && cfg.cfl_target < 1.0))
    throw std::invalid_argument("cfl_dt: cfl_target must be in (0,1)");
  const Velocity vel = velocity(state.psi);
  const GridSpec& g = state.psi.grid();
  double umax = 0.0, vmax = 0.0;
  const double* u = vel.u.data();
  const double* v = vel.v.data();
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    umax = std::max(umax, std::fabs(u[idx]));
    vmax = std::max(vmax, std::fabs(v[idx]));
  }
  if (umax == 0.0 && vmax == 0.0) return cfg.dt;
  double dt = cfg.dt;
  if (umax > 0.0) dt = std::min(dt, cfg.cfl_target * g.dx / umax);
  if (vmax > 0.0) dt = std::min(dt, cfg.cfl_target * g.dy / vmax);
  return std::clamp(dt, 1e-8, cfg.dt);
}

State integrate(State state, const Params& params, const StepperConfig& cfg,
                StepperMemory& mem, const SolverPlan& plan,
                std::span<const Observer> observers) {
  validate(params, cfg.dt);
  Scratch sc;
  long n = 0;
  notify(observers, n, state);
  if (!cfg.adaptive) {
    while (state.t < cfg.t_end - 0.5 * cfg.dt) {
      step_impl(state, params, cfg, cfg.dt, mem, plan, sc);
      notify(observers, ++n, state);
    }
  } else {
    const double eps = 1e-12 * std::max(1.0, std::fabs(cfg.t_end));
    while (cfg.t_end - state.t > eps) {
      const double dt = std::min(cfl_dt(state, cfg), cfg.t_end - state.t);
      step_impl(state, params, cfg, dt, mem, plan, sc);
      notify(observers, ++n, state);
    }
  }
  return state;
}

}  // namespace nbch
