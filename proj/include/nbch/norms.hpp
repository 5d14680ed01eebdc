#pragma once

#include "nbch/field.hpp"

namespace nbch {

/// Discrete L2 inner product: sum a*b*dx*dy over interior nodes.
double inner_product(const ScalarField& a, const ScalarField& b);

/// sqrt(inner_product(a, a)).
double l2_norm(const ScalarField& a);

/// Discrete H1 seminorm ||grad a||. Forward differences over every gap,
/// including the jumps onto the zero boundary, so the summation-by-parts
/// identity (laplacian(a), a) = -h1_seminorm(a)^2 holds to rounding.
double h1_seminorm(const ScalarField& a);

/// (sum |a|^p dx dy)^(1/p). p >= 1; small integer p use plain multiplies,
/// and p = 4 is evaluated as sqrt(sqrt(.)) so power-of-two field scalings
/// rescale the norm exactly.
double lp_norm(const ScalarField& a, double p);

}  // namespace nbch
