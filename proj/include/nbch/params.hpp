#pragma once

#include <optional>

#include "nbch/field.hpp"

namespace nbch {

/// Physical parameters and forcing of the vorticity/temperature system
///   d xi/dt    - lap xi        + J(psi, xi)    + (Ra/Pr) d theta/dx = f
///   d theta/dt - (1/Pr) lap theta + J(psi, theta)                   = g
/// with lap psi = xi. An empty forcing field means identically zero.
struct Params {
  double Pr = 1.0;  // Prandtl number, > 0
  double Ra = 0.0;  // Rayleigh number, >= 0
  ScalarField f;    // vorticity forcing
  ScalarField g;    // temperature forcing

  /// Estimated Poincare constant of the truncated channel. No closed form is
  /// assumed anywhere; the inequality sweeps produce the estimate and the
  /// cutoff feasibility check consumes it.
  std::optional<double> lambda_est;
};

}  // namespace nbch
