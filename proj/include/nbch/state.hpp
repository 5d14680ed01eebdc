#pragma once

#include "nbch/field.hpp"

namespace nbch {

/// Prognostic state. psi satisfies the discrete lap(psi) = xi to the Poisson
/// solver tolerance after every step; it is always refreshed from xi, never
/// integrated or extrapolated.
struct State {
  ScalarField xi;     // vorticity
  ScalarField theta;  // temperature
  ScalarField psi;    // streamfunction: u = d psi/dy, v = -d psi/dx
  double t = 0.0;
};

/// Zero state at t = 0 on the given grid.
inline State make_state(const GridSpec& g) {
  return State{ScalarField(g), ScalarField(g), ScalarField(g), 0.0};
}

}  // namespace nbch
