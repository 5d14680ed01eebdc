#pragma once

#include "nbch/field.hpp"

namespace nbch {

/// 5-point Laplacian with boundary-as-zero reads.
ScalarField laplacian(const ScalarField& a);
void laplacian_into(const ScalarField& a, ScalarField& out);

/// Central first differences, zero extension at the boundary.
ScalarField ddx(const ScalarField& a);
void ddx_into(const ScalarField& a, ScalarField& out);
ScalarField ddy(const ScalarField& a);
void ddy_into(const ScalarField& a, ScalarField& out);

/// Compact three-point second differences, zero extension at the boundary.
ScalarField ddx2(const ScalarField& a);
void ddx2_into(const ScalarField& a, ScalarField& out);
ScalarField ddy2(const ScalarField& a);
void ddy2_into(const ScalarField& a, ScalarField& out);

/// Advection bracket J(u,v) = u_y v_x - u_x v_y, discretized as the Arakawa
/// 9-point average (J1+J2+J3)/3. Discrete conservation holds: both
/// (J(p,q), q) and (J(p,q), p) vanish, so advection does no L2 work on either
/// argument. Terms are paired so that swapping the arguments negates the
/// result bitwise and J(a,a) is exactly the zero field; this needs
/// -ffp-contract=off and no fast-math (set project-wide).
ScalarField jacobian(const ScalarField& u, const ScalarField& v);
void jacobian_into(const ScalarField& u, const ScalarField& v, ScalarField& out);

struct Velocity {
  ScalarField u;
  ScalarField v;
};

/// u = d psi/dy, v = -d psi/dx (sign convention fixed by lap psi = xi).
Velocity velocity(const ScalarField& psi);

/// Full H^k norm, k in {0,1,2,3}: sqrt of the sum of ||D^(m,n) a||^2 over all
/// m+n <= k, each mixed derivative counted once. Same-direction pairs use the
/// compact second difference on the parent field and the third derivative is
/// ddx/ddy of that, x chain before y chain. Composed that way, every stencil
/// reads its zero extension only where a sine-series field genuinely
/// vanishes, so the higher norms stay free of boundary-layer terms that would
/// otherwise grow under refinement.
double hk_norm(const ScalarField& a, int k);

}  // namespace nbch
