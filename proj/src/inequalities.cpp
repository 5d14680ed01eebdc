#include "nbch/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "nbch/diagnostics.hpp"
#include "nbch/norms.hpp"
#include "nbch/operators.hpp"
#include "nbch/reduce.hpp"

namespace nbch {

nlohmann::json to_json(const IneqReport& r) {
  return nlohmann::json{{"id", r.id},
                        {"n", r.n},
                        {"max_constant", r.max_constant},
                        {"argmax_seed", r.argmax_seed},
                        {"bound", r.bound},
                        {"pass", r.pass}};
}

namespace {

// Uniform in (0, 1] from the raw engine output, then Box-Muller. Avoids
// std::normal_distribution, whose value sequence is not pinned by the
// standard; this path is bitwise stable across toolchains.
double u01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

double draw_normal(std::mt19937_64& rng) {
  const double u1 = u01(rng);
  const double u2 = u01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

ScalarField random_field(std::uint64_t seed, const GridSpec& grid,
                         std::size_t modes, double decay) {
  if (modes == 0) throw std::invalid_argument("random_field: modes must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<double> a(modes * modes);
  for (std::size_t m = 1; m <= modes; ++m)
    for (std::size_t n = 1; n <= modes; ++n)
      a[(m - 1) * modes + (n - 1)] =
          draw_normal(rng) *
          std::pow(static_cast<double>(m * m + n * n), -0.5 * decay);

  std::vector<double> sx(modes * grid.nx), sy(modes * grid.ny);
  for (std::size_t m = 1; m <= modes; ++m) {
    for (std::size_t i = 0; i < grid.nx; ++i)
      sx[(m - 1) * grid.nx + i] =
          std::sin(static_cast<double>(m) * std::numbers::pi * grid.x(i) / grid.L);
    for (std::size_t j = 0; j < grid.ny; ++j)
      sy[(m - 1) * grid.ny + j] = std::sin(
          static_cast<double>(m) * std::numbers::pi * (grid.y(j) + grid.Y) /
          (2.0 * grid.Y));
  }

  // Collapse the n-sum into per-m row profiles, then expand. Fixed order
  // throughout, so the result is reproducible bit for bit.
  std::vector<double> rowp(modes * grid.ny, 0.0);
  for (std::size_t m = 0; m < modes; ++m)
    for (std::size_t n = 0; n < modes; ++n)
      for (std::size_t j = 0; j < grid.ny; ++j)
        rowp[m * grid.ny + j] += a[m * modes + n] * sy[n * grid.ny + j];

  ScalarField out(grid);
  for (std::size_t j = 0; j < grid.ny; ++j)
    for (std::size_t i = 0; i < grid.nx; ++i) {
      double acc = 0.0;
      for (std::size_t m = 0; m < modes; ++m)
        acc += rowp[m * grid.ny + j] * sx[m * grid.nx + i];
      out(i, j) = acc;
    }
  return out;
}

ScalarField eigenmode_field(const GridSpec& grid) {
  ScalarField out(grid);
  for (std::size_t j = 0; j < grid.ny; ++j)
    for (std::size_t i = 0; i < grid.nx; ++i)
      out(i, j) = std::sin(std::numbers::pi * grid.x(i) / grid.L) *
                  std::sin(std::numbers::pi * (grid.y(j) + grid.Y) / (2.0 * grid.Y));
  return out;
}

IneqReport check_ladyzhenskaya(const std::vector<SeededField>& fields,
                               double bound) {
  if (fields.empty())
    throw std::invalid_argument("check_ladyzhenskaya: no fields");
  IneqReport r;
  r.id = "ladyzhenskaya";
  r.bound = bound;
  for (const SeededField& f : fields) {
    const double l2 = l2_norm(f.u);
    if (l2 == 0.0) continue;
    const double h1 = h1_seminorm(f.u);
    const double full_h1 = std::sqrt(l2 * l2 + h1 * h1);
    const double l4 = lp_norm(f.u, 4.0);
    const double c = l4 / std::sqrt(full_h1 * l2);
    ++r.n;
    if (c > r.max_constant) {
      r.max_constant = c;
      r.argmax_seed = f.seed;
    }
  }
  r.pass = r.n > 0 && r.max_constant <= r.bound;
  return r;
}

IneqReport check_poincare(const std::vector<SeededField>& fields) {
  if (fields.empty()) throw std::invalid_argument("check_poincare: no fields");
  IneqReport r;
  r.id = "poincare";
  r.bound = 1.0 / std::sqrt(mu1_h(fields.front().u.grid())) + 1e-10;
  for (const SeededField& f : fields) {
    const double h1 = h1_seminorm(f.u);
    if (h1 == 0.0) continue;
    const double c = l2_norm(f.u) / h1;
    ++r.n;
    if (c > r.max_constant) {
      r.max_constant = c;
      r.argmax_seed = f.seed;
    }
  }
  r.pass = r.n > 0 && r.max_constant <= r.bound;
  return r;
}

CutoffCheck check_cutoff_poincare(const std::vector<SeededField>& fields,
                                  double k, double lambda_est,
                                  const std::vector<double>& beta_grid,
                                  double tol) {
  if (fields.empty())
    throw std::invalid_argument("check_cutoff_poincare: no fields");
  if (!(k > 0.0) || !(lambda_est > 0.0))
    throw std::invalid_argument("check_cutoff_poincare: k and lambda_est must be > 0");

  CutoffCheck out;
  const double alpha = 1.0 / (lambda_est * lambda_est) - tol;
  std::vector<double> betas = beta_grid;
  if (betas.empty())
    betas = {0.0,         alpha / 8.0, alpha / 4.0, alpha / 2.0,
             alpha,       2.0 * alpha, 4.0 * alpha, 8.0 * alpha,
             16.0 * alpha, 32.0 * alpha, 64.0 * alpha};
  std::sort(betas.begin(), betas.end());

  IneqReport& r = out.report;
  r.id = "cutoff_poincare";
  r.bound = alpha;

  const GridSpec& g = fields.front().u.grid();
  double beta_req = 0.0;
  for (const SeededField& f : fields) {
    const double l2 = l2_norm(f.u);
    if (l2 == 0.0) continue;
    ScalarField gx = ddx(f.u);
    ScalarField gy = ddy(f.u);
    const double lhs = g.dx * g.dy * rows_sum(g.ny, [&](std::size_t j) {
                         const double phi = cutoff_phi(g.y(j) * g.y(j) / (k * k));
                         if (phi == 0.0) return 0.0;
                         const double* px = gx.row(j);
                         const double* py = gy.row(j);
                         return phi * phi * pairwise_sum(0, g.nx, [&](std::size_t i) {
                                  return px[i] * px[i] + py[i] * py[i];
                                });
                       });
    const double A = g.dx * g.dy * rows_sum(g.ny, [&](std::size_t j) {
                       const double phi = cutoff_phi(g.y(j) * g.y(j) / (k * k));
                       if (phi == 0.0) return 0.0;
                       const double* pv = f.u.row(j);
                       return phi * phi * pairwise_sum(0, g.nx, [&](std::size_t i) {
                                return pv[i] * pv[i];
                              });
                     });
    const double B = l2 * l2 / (k * k);
    const double need = (alpha * A - lhs) / B;
    ++r.n;
    if (need > beta_req) {
      beta_req = need;
      r.argmax_seed = f.seed;
    }
  }
  beta_req = std::max(beta_req, 0.0);

  auto it = std::lower_bound(betas.begin(), betas.end(), beta_req);
  if (it != betas.end()) {
    r.max_constant = *it;
    r.pass = r.n > 0;
  } else {
    r.max_constant = beta_req;
    r.pass = false;
    out.notes += "required beta exceeds the supplied grid\n";
  }

  const double ymax = std::max(std::fabs(g.y(0)), std::fabs(g.y(g.ny - 1)));
  if (std::sqrt(2.0) * k >= ymax)
    out.notes +=
        "cutoff plateau |y| >= sqrt(2) k lies outside the channel; the beta "
        "term absorbs the entire tail\n";
  return out;
}

std::vector<IneqReport> check_jacobian_bounds(
    const std::vector<SeededPair>& pairs, double bound_one, double bound_two) {
  if (pairs.empty())
    throw std::invalid_argument("check_jacobian_bounds: no pairs");
  IneqReport one, two;
  one.id = "jacobian_one_star";
  one.bound = bound_one;
  two.id = "jacobian_two_star";
  two.bound = bound_two;
  for (const SeededPair& p : pairs) {
    const ScalarField J = jacobian(p.u, p.v);
    const double nJ = l2_norm(J);
    const double d1 = hk_norm(p.u, 2) * hk_norm(p.v, 2);
    if (d1 > 0.0) {
      const double c = nJ / d1;
      ++one.n;
      if (c > one.max_constant) {
        one.max_constant = c;
        one.argmax_seed = p.seed;
      }
    }
    const double d2 = hk_norm(p.u, 3) * h1_seminorm(p.v);
    if (d2 > 0.0) {
      const double c = nJ / d2;
      ++two.n;
      if (c > two.max_constant) {
        two.max_constant = c;
        two.argmax_seed = p.seed;
      }
    }
  }
  one.pass = one.n > 0 && one.max_constant <= one.bound;
  two.pass = two.n > 0 && two.max_constant <= two.bound;
  return {one, two};
}

}  // namespace nbch
