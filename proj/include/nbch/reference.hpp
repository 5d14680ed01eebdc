#pragma once

#include "nbch/field.hpp"
#include "nbch/state.hpp"

namespace nbch::ref {

/// Straight-line serial implementations of the hot kernels, kept as the
/// comparison baseline for the parallel versions: plain nested loops, naive
/// left-to-right accumulation, the textbook three-term Arakawa average
/// written out independently of the production grouping trick.
/// Tests compare against these; the benchmark target times both.
ScalarField laplacian(const ScalarField& a);
ScalarField ddx(const ScalarField& a);
ScalarField ddy(const ScalarField& a);
ScalarField ddx2(const ScalarField& a);
ScalarField ddy2(const ScalarField& a);
ScalarField jacobian(const ScalarField& u, const ScalarField& v);
double inner_product(const ScalarField& a, const ScalarField& b);
double l2_norm(const ScalarField& a);
double h1_seminorm(const ScalarField& a);
double tail_mass(const State& s, double k);

}  // namespace nbch::ref
