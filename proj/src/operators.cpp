#include "nbch/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "nbch/norms.hpp"

namespace nbch {

namespace {

void ensure_out(const ScalarField& a, ScalarField& out) {
  if (!(out.grid() == a.grid())) out = ScalarField(a.grid());
}

}  // namespace

void laplacian_into(const ScalarField& a, ScalarField& out) {
  ensure_out(a, out);
  const GridSpec& g = a.grid();
  const double cx = 1.0 / (g.dx * g.dx);
  const double cy = 1.0 / (g.dy * g.dy);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < std::ptrdiff_t(g.ny); ++j) {
    double* o = out.row(std::size_t(j));
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(g.nx); ++i) {
      const double c = a.at0(i, j);
      o[i] = (a.at0(i + 1, j) - 2.0 * c + a.at0(i - 1, j)) * cx +
             (a.at0(i, j + 1) - 2.0 * c + a.at0(i, j - 1)) * cy;
    }
  }
}

ScalarField laplacian(const ScalarField& a) {
  ScalarField out(a.grid());
  laplacian_into(a, out);
  return out;
}

void ddx_into(const ScalarField& a, ScalarField& out) {
  ensure_out(a, out);
  const GridSpec& g = a.grid();
  const double c = 1.0 / (2.0 * g.dx);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < std::ptrdiff_t(g.ny); ++j) {
    double* o = out.row(std::size_t(j));
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(g.nx); ++i)
      o[i] = (a.at0(i + 1, j) - a.at0(i - 1, j)) * c;
  }
}

ScalarField ddx(const ScalarField& a) {
  ScalarField out(a.grid());
  ddx_into(a, out);
  return out;
}

void ddy_into(const ScalarField& a, ScalarField& out) {
  ensure_out(a, out);
  const GridSpec& g = a.grid();
  const double c = 1.0 / (2.0 * g.dy);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < std::ptrdiff_t(g.ny); ++j) {
    double* o = out.row(std::size_t(j));
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(g.nx); ++i)
      o[i] = (a.at0(i, j + 1) - a.at0(i, j - 1)) * c;
  }
}

ScalarField ddy(const ScalarField& a) {
  ScalarField out(a.grid());
  ddy_into(a, out);
  return out;
}

void ddx2_into(const ScalarField& a, ScalarField& out) {
  ensure_out(a, out);
  const GridSpec& g = a.grid();
  const double c = 1.0 / (g.dx * g.dx);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < std::ptrdiff_t(g.ny); ++j) {
    double* o = out.row(std::size_t(j));
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(g.nx); ++i)
      o[i] = (a.at0(i + 1, j) - 2.0 * a.at0(i, j) + a.at0(i - 1, j)) * c;
  }
}

ScalarField ddx2(const ScalarField& a) {
  ScalarField out(a.grid());
  ddx2_into(a, out);
  return out;
}

void ddy2_into(const ScalarField& a, ScalarField& out) {
  ensure_out(a, out);
  const GridSpec& g = a.grid();
  const double c = 1.0 / (g.dy * g.dy);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < std::ptrdiff_t(g.ny); ++j) {
    double* o = out.row(std::size_t(j));
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(g.nx); ++i)
      o[i] = (a.at0(i, j + 1) - 2.0 * a.at0(i, j) + a.at0(i, j - 1)) * c;
  }
}

ScalarField ddy2(const ScalarField& a) {
  ScalarField out(a.grid());
  ddy2_into(a, out);
  return out;
}

// Arakawa average of the three equivalent second-order forms of
// p_x q_y - p_y q_x, with p = v and q = u so the result is u_y v_x - u_x v_y.
// The nine products below are grouped into pairs (s1,t3), (s2,t4), (s3,t1),
// (s4,t2) that turn into each other under p <-> q; together with the
// commutativity of each product this makes the swap an exact elementwise
// negation, with no reliance on cancellation.
void jacobian_into(const ScalarField& u, const ScalarField& v, ScalarField& out) {
  require_same_grid(u, v);
  ensure_out(u, out);
  const ScalarField& p = v;
  const ScalarField& q = u;
  const GridSpec& g = u.grid();
  const double scale = 1.0 / (12.0 * g.dx * g.dy);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < std::ptrdiff_t(g.ny); ++j) {
    double* o = out.row(std::size_t(j));
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(g.nx); ++i) {
      const double pE = p.at0(i + 1, j), pW = p.at0(i - 1, j);
      const double pN = p.at0(i, j + 1), pS = p.at0(i, j - 1);
      const double pNE = p.at0(i + 1, j + 1), pNW = p.at0(i - 1, j + 1);
      const double pSE = p.at0(i + 1, j - 1), pSW = p.at0(i - 1, j - 1);
      const double qE = q.at0(i + 1, j), qW = q.at0(i - 1, j);
      const double qN = q.at0(i, j + 1), qS = q.at0(i, j - 1);
      const double qNE = q.at0(i + 1, j + 1), qNW = q.at0(i - 1, j + 1);
      const double qSE = q.at0(i + 1, j - 1), qSW = q.at0(i - 1, j - 1);

      const double j1 = (pE - pW) * (qN - qS) - (pN - pS) * (qE - qW);

      const double s1 = pE * (qNE - qSE);
      const double s2 = pW * (qNW - qSW);
      const double s3 = pN * (qNE - qNW);
      const double s4 = pS * (qSE - qSW);
      const double t1 = qN * (pNE - pNW);
      const double t2 = qS * (pSE - pSW);
      const double t3 = qE * (pNE - pSE);
      const double t4 = qW * (pNW - pSW);

      const double g1 = s1 - t3;
      const double g2 = t4 - s2;
      const double g3 = t1 - s3;
      const double g4 = s4 - t2;

      o[i] = (j1 + ((g1 + g2) + (g3 + g4))) * scale;
    }
  }
}

ScalarField jacobian(const ScalarField& u, const ScalarField& v) {
  ScalarField out(u.grid());
  jacobian_into(u, v, out);
  return out;
}

Velocity velocity(const ScalarField& psi) {
  Velocity vel{ddy(psi), ddx(psi)};
  const GridSpec& g = psi.grid();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < std::ptrdiff_t(g.ny); ++j) {
    double* r = vel.v.row(std::size_t(j));
    for (std::size_t i = 0; i < g.nx; ++i) r[i] = -r[i];
  }
  return vel;
}

double hk_norm(const ScalarField& a, int k) {
  if (k < 0 || k > 3)
    throw std::invalid_argument("hk_norm: k must be in {0,1,2,3}");
  // x derivatives first: a, ddx a, ddx2 a, ddx(ddx2 a). Repeating a central
  // first difference in the same direction would read zero ghosts of a field
  // that no longer vanishes at that wall and pollute the norm with an O(1/h)
  // boundary layer; the compact second difference keeps every ghost read on a
  // field with a sin factor in the differenced direction.
  ScalarField dx1, dx2, dx3;
  if (k >= 1) ddx_into(a, dx1);
  if (k >= 2) ddx2_into(a, dx2);
  if (k >= 3) ddx_into(dx2, dx3);
  const ScalarField* chain[4] = {&a, &dx1, &dx2, &dx3};
  double acc = 0.0;
  ScalarField ty, tyy, tyyy;
  for (int m = 0; m <= k; ++m) {
    const ScalarField& f = *chain[m];
    double v = l2_norm(f);
    acc += v * v;
    const int rem = k - m;
    if (rem >= 1) {
      ddy_into(f, ty);
      v = l2_norm(ty);
      acc += v * v;
    }
    if (rem >= 2) {
      ddy2_into(f, tyy);
      v = l2_norm(tyy);
      acc += v * v;
    }
    if (rem >= 3) {
      ddy_into(tyy, tyyy);
      v = l2_norm(tyyy);
      acc += v * v;
    }
  }
  return std::sqrt(acc);
}

}  // namespace nbch
