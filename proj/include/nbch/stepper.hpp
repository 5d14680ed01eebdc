#pragma once

#include <functional>
#include <span>

#include "nbch/params.hpp"
#include "nbch/poisson.hpp"
#include "nbch/state.hpp"

namespace nbch {

struct StepperConfig {
  double dt = 1e-3;         // > 0; also the adaptive ceiling
  double cfl_target = 0.4;  // in (0,1)
  bool adaptive = false;    // off in verification runs so trajectories are exactly reproducible
  double t_end = 0.0;
  bool advection = true;    // disabled only by stability tests
};

/// AB2 history. Cleared (forcing an Euler restart) whenever dt changes by
/// more than 10% between consecutive steps.
struct StepperMemory {
  ScalarField Fxi_prev;
  ScalarField Ftheta_prev;
  double dt_prev = 0.0;
  bool valid = false;

  void clear() { valid = false; }
};

struct Tendencies {
  ScalarField Fxi;
  ScalarField Ftheta;
};

/// Explicit right-hand sides, diffusion excluded (it is treated implicitly):
///   Fxi    = -J(psi, xi)    - (Ra/Pr) ddx(theta) + f
///   Ftheta = -J(psi, theta) + g
/// Aborts with the first offending node if either tendency goes non-finite.
Tendencies explicit_tendency(const State& state, const Params& params);

/// One CNAB2 step of size cfg.dt:
///   (I - (dt/2) lap) xi'    = (I + (dt/2) lap) xi    + dt (b1 Fxi^n    + b2 Fxi^(n-1))
///   (I - (dt/2Pr) lap) theta' = (I + (dt/2Pr) lap) theta + dt (b1 Fth^n + b2 Fth^(n-1))
/// with (b1, b2) = (3/2, -1/2) at uniform dt (variable-step weights
/// b1 = 1 + r/2, b2 = -r/2, r = dt/dt_prev, reduce to these exactly) and an
/// Euler first step (b1 = 1, b2 = 0). psi is then refreshed from the new xi
/// and t advances by dt.
State step(State state, const Params& params, const StepperConfig& cfg,
           StepperMemory& mem, const SolverPlan& plan);

/// Advective time-step bound:
/// cfl_target * min(dx/max|u|, dy/max|v|), clamped to [1e-8, cfg.dt];
/// returns cfg.dt for a quiescent state.
double cfl_dt(const State& state, const StepperConfig& cfg);

/// Called with (steps completed since integrate() entry, state) at entry and
/// after every `every`-th step. Observers must not mutate the state.
struct Observer {
  long every = 1;
  std::function<void(long, const State&)> fn;
};

/// Steps from state.t to cfg.t_end, fixed dt unless cfg.adaptive (then each
/// step uses cfl_dt, shrunk further to land exactly on t_end). The caller
/// owns the memory so a split run (integrate to T/2, then to T) reproduces a
/// single full run bitwise.
State integrate(State state, const Params& params, const StepperConfig& cfg,
                StepperMemory& mem, const SolverPlan& plan,
                std::span<const Observer> observers = {});

}  // namespace nbch
