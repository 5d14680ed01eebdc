#include "nbch/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "nbch/norms.hpp"
#include "nbch/operators.hpp"
#include "nbch/persistence.hpp"
#include "nbch/reduce.hpp"
#include "nbch/stepper.hpp"

namespace nbch {

double cutoff_phi(double s) {
  s = std::fabs(s);
  if (s <= 1.0) return 0.0;
  if (s >= 2.0) return 1.0;
  const double tau = s - 1.0;
  return ((6.0 * tau - 15.0) * tau + 10.0) * tau * tau * tau;
}

double tail_mass(const State& state, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("tail_mass: k must be > 0");
  require_same_grid(state.xi, state.theta);
  const GridSpec& g = state.xi.grid();
  const double s = rows_sum(g.ny, [&](std::size_t j) {
    const double y = g.y(j);
    const double phi = cutoff_phi(y * y / (k * k));
    if (phi == 0.0) return 0.0;
    const double w = phi * phi;
    const double* xi = state.xi.row(j);
    const double* th = state.theta.row(j);
    return w * pairwise_sum(0, g.nx, [&](std::size_t i) {
             return xi[i] * xi[i] + th[i] * th[i];
           });
  });
  return s * g.dx * g.dy;
}

DiagRecord sample(const State& state, const State* prev, const Params& params,
                  const std::vector<double>& ks) {
  DiagRecord r;
  r.t = state.t;
  r.l2_xi = l2_norm(state.xi);
  r.l2_theta = l2_norm(state.theta);
  r.h1_xi = h1_seminorm(state.xi);
  r.h1_theta = h1_seminorm(state.theta);

  ScalarField lap_xi = laplacian(state.xi);
  ScalarField lap_th = laplacian(state.theta);
  r.lap_xi = l2_norm(lap_xi);
  r.lap_theta = l2_norm(lap_th);

  std::vector<double> sorted = ks;
  std::sort(sorted.begin(), sorted.end());
  for (double k : sorted) r.tail.emplace_back(k, tail_mass(state, k));

  ScalarField thx = ddx(state.theta);
  r.work_buoy = (params.Ra / params.Pr) * inner_product(thx, state.xi);
  r.work_g = params.g.empty() ? 0.0 : inner_product(params.g, state.theta);
  r.work_f = params.f.empty() ? 0.0 : inner_product(params.f, state.xi);

  // Right-hand-side time-derivative norms (report extras): the full
  // tendencies, diffusion included.
  {
    Tendencies F = explicit_tendency(state, params);
    const GridSpec& g = state.xi.grid();
    ScalarField tmp(g);
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t i = 0; i < g.nx; ++i)
        tmp(i, j) = lap_xi(i, j) + F.Fxi(i, j);
    r.dxi_dt_rhs = l2_norm(tmp);
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t i = 0; i < g.nx; ++i)
        tmp(i, j) = lap_th(i, j) / params.Pr + F.Ftheta(i, j);
    r.dtheta_dt_rhs = l2_norm(tmp);
  }

  if (prev) {
    require_same_grid(prev->xi, state.xi);
    const double dt = state.t - prev->t;
    if (!(dt > 0.0))
      throw std::invalid_argument("sample: prev state must be strictly earlier");
    const GridSpec& g = state.xi.grid();
    ScalarField diff(g);
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t i = 0; i < g.nx; ++i)
        diff(i, j) = state.xi(i, j) - prev->xi(i, j);
    r.dxi_dt = l2_norm(diff) / dt;
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t i = 0; i < g.nx; ++i)
        diff(i, j) = state.theta(i, j) - prev->theta(i, j);
    r.dtheta_dt = l2_norm(diff) / dt;

    // Backward-difference energy residuals; the collector upgrades these to
    // centered differences one sample later.
    const double Eth = r.l2_theta * r.l2_theta;
    const double Exi = r.l2_xi * r.l2_xi;
    const double Eth_p = l2_norm(prev->theta) * l2_norm(prev->theta);
    const double Exi_p = l2_norm(prev->xi) * l2_norm(prev->xi);
    r.energy_residual_theta = std::fabs(
        0.5 * (Eth - Eth_p) / dt + r.h1_theta * r.h1_theta / params.Pr - r.work_g);
    r.energy_residual_xi =
        std::fabs(0.5 * (Exi - Exi_p) / dt + r.h1_xi * r.h1_xi + r.work_buoy -
                  r.work_f);
  }
  return r;
}

double windowed_integral(const std::vector<std::pair<double, double>>& series,
                         double t0, double width) {
  if (series.size() < 2)
    throw std::invalid_argument("windowed_integral: need at least two samples");
  if (!(width > 0.0)) throw std::invalid_argument("windowed_integral: width must be > 0");
  const double t1 = t0 + width;
  const double slack = 1e-9 * std::max(1.0, std::fabs(series.back().first));
  if (t0 < series.front().first - slack || t1 > series.back().first + slack)
    throw std::invalid_argument("windowed_integral: series does not cover the window");

  auto value_at = [&](double t) {
    auto it = std::lower_bound(series.begin(), series.end(), t,
                               [](const auto& p, double x) { return p.first < x; });
    if (it == series.begin()) return it->second;
    if (it == series.end()) return series.back().second;
    const auto& [tb, vb] = *it;
    const auto& [ta, va] = *(it - 1);
    const double w = (t - ta) / (tb - ta);
    return va + w * (vb - va);
  };

  double acc = 0.0;
  double tprev = t0, vprev = value_at(t0);
  for (const auto& [t, v] : series) {
    if (t <= t0) continue;
    if (t >= t1) break;
    acc += 0.5 * (vprev + v) * (t - tprev);
    tprev = t;
    vprev = v;
  }
  const double vend = value_at(t1);
  acc += 0.5 * (vprev + vend) * (t1 - tprev);
  return acc;
}

DiagCollector::DiagCollector(const Params* params, std::vector<double> ks,
                             std::string csv_path)
    : params_(params), ks_(std::move(ks)), csv_path_(std::move(csv_path)) {
  std::sort(ks_.begin(), ks_.end());
}

void DiagCollector::flush(DiagRecord&& r) {
  if (!csv_path_.empty()) append_record(r, csv_path_);
  records_.push_back(std::move(r));
}

void DiagCollector::operator()(long, const State& s) {
  DiagRecord r = sample(s, prev_ ? &*prev_ : nullptr, *params_, ks_);
  if (pending_) {
    const double tp = pending_->t;
    const double Eth_p = pending_->l2_theta * pending_->l2_theta;
    const double Exi_p = pending_->l2_xi * pending_->l2_xi;
    const double Eth_r = r.l2_theta * r.l2_theta;
    const double Exi_r = r.l2_xi * r.l2_xi;
    if (have_before_) {
      // Three-point derivative at tp on a possibly non-uniform stencil.
      const double hm = tp - t_before_, hp = r.t - tp;
      const double den = hm * hp * (hm + hp);
      const double dEth = (hm * hm * Eth_r - hp * hp * Eth_before_ +
                           (hp * hp - hm * hm) * Eth_p) / den;
      const double dExi = (hm * hm * Exi_r - hp * hp * Exi_before_ +
                           (hp * hp - hm * hm) * Exi_p) / den;
      pending_->energy_residual_theta =
          std::fabs(0.5 * dEth + pending_->h1_theta * pending_->h1_theta / params_->Pr -
                    pending_->work_g);
      pending_->energy_residual_xi =
          std::fabs(0.5 * dExi + pending_->h1_xi * pending_->h1_xi +
                    pending_->work_buoy - pending_->work_f);
    }
    t_before_ = tp;
    Eth_before_ = Eth_p;
    Exi_before_ = Exi_p;
    have_before_ = true;
    flush(std::move(*pending_));
  }
  pending_ = std::move(r);
  prev_ = s;
}

void DiagCollector::finish() {
  if (pending_) {
    flush(std::move(*pending_));
    pending_.reset();
  }
}

std::vector<std::pair<double, double>> DiagCollector::series(
    const std::vector<DiagRecord>& recs, double DiagRecord::*field) {
  std::vector<std::pair<double, double>> out;
  out.reserve(recs.size());
  for (const DiagRecord& r : recs) out.emplace_back(r.t, r.*field);
  return out;
}

std::vector<std::pair<double, double>> DiagCollector::series(
    const std::vector<DiagRecord>& recs,
    std::optional<double> DiagRecord::*field) {
  std::vector<std::pair<double, double>> out;
  out.reserve(recs.size());
  for (const DiagRecord& r : recs)
    if ((r.*field).has_value()) out.emplace_back(r.t, *(r.*field));
  return out;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt17(const std::optional<double>& v) {
  return v ? fmt17(*v) : "nan";
}

}  // namespace

std::string csv_header(const std::vector<double>& ks) {
  std::string h =
      "t,l2_xi,l2_theta,h1_xi,h1_theta,lap_xi,lap_theta,dxi_dt,dtheta_dt,"
      "energy_residual_theta,energy_residual_xi";
  std::vector<double> sorted = ks;
  std::sort(sorted.begin(), sorted.end());
  for (double k : sorted) h += ",tail_k=" + fmt17(k);
  return h;
}

std::string csv_row(const DiagRecord& r) {
  std::string row = fmt17(r.t);
  for (double v : {r.l2_xi, r.l2_theta, r.h1_xi, r.h1_theta, r.lap_xi, r.lap_theta})
    row += "," + fmt17(v);
  row += "," + fmt17(r.dxi_dt);
  row += "," + fmt17(r.dtheta_dt);
  row += "," + fmt17(r.energy_residual_theta);
  row += "," + fmt17(r.energy_residual_xi);
  for (const auto& [k, m] : r.tail) row += "," + fmt17(m);
  return row;
}

}  // namespace nbch
