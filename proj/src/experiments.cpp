#include "nbch/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <string>

#include "nbch/diagnostics.hpp"
#include "nbch/inequalities.hpp"
#include "nbch/norms.hpp"
#include "nbch/operators.hpp"
#include "nbch/persistence.hpp"
#include "nbch/poisson.hpp"
#include "nbch/stepper.hpp"

namespace nbch {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const char* where) {
  if (!j.is_object()) fail(std::string(where) + " must be an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (k == a) ok = true;
    if (!ok) fail(std::string("unknown key ") + where + "." + k);
  }
}

double num_or(const json& sec, const char* key, double dflt, const char* path) {
  const json* v = find(sec, key);
  if (!v) return dflt;
  if (!v->is_number()) fail(std::string(path) + " must be a number");
  const double x = v->get<double>();
  if (!std::isfinite(x)) fail(std::string(path) + " must be finite");
  return x;
}

std::uint64_t uint_or(const json& sec, const char* key, std::uint64_t dflt,
                      const char* path) {
  const json* v = find(sec, key);
  if (!v) return dflt;
  if (!v->is_number_integer() || (v->is_number_integer() && v->get<long long>() < 0))
    fail(std::string(path) + " must be a non-negative integer");
  return v->get<std::uint64_t>();
}

std::string str_or(const json& sec, const char* key, std::string dflt,
                   const char* path) {
  const json* v = find(sec, key);
  if (!v) return dflt;
  if (!v->is_string()) fail(std::string(path) + " must be a string");
  return v->get<std::string>();
}

std::vector<double> arr_or(const json& sec, const char* key,
                           std::vector<double> dflt, const char* path) {
  const json* v = find(sec, key);
  if (!v) return dflt;
  if (!v->is_array()) fail(std::string(path) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : *v) {
    if (!e.is_number()) fail(std::string(path) + " must contain only numbers");
    const double x = e.get<double>();
    if (!std::isfinite(x)) fail(std::string(path) + " must be finite");
    out.push_back(x);
  }
  return out;
}

bool known_scenario(const std::string& s) {
  return s == "decay" || s == "absorb" || s == "tail" || s == "regularity" ||
         s == "convergence" || s == "inequalities";
}

double sq(double x) { return x * x; }

}  // namespace

ScenarioConfig parse_config(const json& j) {
  if (!j.is_object()) fail("top level must be an object");
  check_keys(j,
             {"scenario", "grid", "phys", "ic", "forcing", "time", "sample",
              "tail", "absorb", "ineq", "out"},
             "config");
  ScenarioConfig c;
  if (const json* v = find(j, "scenario")) {
    if (!v->is_string()) fail("scenario must be a string");
    c.scenario = v->get<std::string>();
    if (!known_scenario(c.scenario)) fail("unknown scenario " + c.scenario);
  }
  if (const json* g = find(j, "grid")) {
    check_keys(*g, {"L", "Y", "nx", "ny"}, "grid");
    c.L = num_or(*g, "L", c.L, "grid.L");
    c.Y = num_or(*g, "Y", c.Y, "grid.Y");
    c.nx = static_cast<std::size_t>(uint_or(*g, "nx", c.nx, "grid.nx"));
    c.ny = static_cast<std::size_t>(uint_or(*g, "ny", c.ny, "grid.ny"));
  }
  if (const json* p = find(j, "phys")) {
    check_keys(*p, {"Pr", "Ra"}, "phys");
    c.Pr = num_or(*p, "Pr", c.Pr, "phys.Pr");
    c.Ra = num_or(*p, "Ra", c.Ra, "phys.Ra");
  }
  if (const json* ic = find(j, "ic")) {
    check_keys(*ic, {"kind", "R", "seed", "y_extent"}, "ic");
    c.ic_kind = str_or(*ic, "kind", c.ic_kind, "ic.kind");
    c.ic_R = num_or(*ic, "R", c.ic_R, "ic.R");
    c.ic_seed = uint_or(*ic, "seed", c.ic_seed, "ic.seed");
    c.ic_y_extent = num_or(*ic, "y_extent", c.ic_y_extent, "ic.y_extent");
  }
  if (const json* f = find(j, "forcing")) {
    check_keys(*f, {"kind", "amp", "y_extent"}, "forcing");
    c.forcing_kind = str_or(*f, "kind", c.forcing_kind, "forcing.kind");
    c.forcing_amp = num_or(*f, "amp", c.forcing_amp, "forcing.amp");
    c.forcing_y_extent =
        num_or(*f, "y_extent", c.forcing_y_extent, "forcing.y_extent");
  }
  if (const json* t = find(j, "time")) {
    check_keys(*t, {"dt", "t_end"}, "time");
    c.dt = num_or(*t, "dt", c.dt, "time.dt");
    c.t_end = num_or(*t, "t_end", c.t_end, "time.t_end");
  }
  if (const json* s = find(j, "sample")) {
    check_keys(*s, {"every"}, "sample");
    c.sample_every =
        static_cast<long>(uint_or(*s, "every", c.sample_every, "sample.every"));
  }
  if (const json* t = find(j, "tail")) {
    check_keys(*t, {"ks", "eps"}, "tail");
    c.tail_ks = arr_or(*t, "ks", c.tail_ks, "tail.ks");
    c.tail_eps = num_or(*t, "eps", c.tail_eps, "tail.eps");
  }
  if (const json* a = find(j, "absorb")) {
    check_keys(*a, {"R_ladder"}, "absorb");
    c.absorb_R = arr_or(*a, "R_ladder", c.absorb_R, "absorb.R_ladder");
  }
  if (const json* q = find(j, "ineq")) {
    check_keys(*q, {"samples", "modes", "decay"}, "ineq");
    c.ineq_samples =
        static_cast<std::size_t>(uint_or(*q, "samples", c.ineq_samples, "ineq.samples"));
    c.ineq_modes =
        static_cast<std::size_t>(uint_or(*q, "modes", c.ineq_modes, "ineq.modes"));
    c.ineq_decay = num_or(*q, "decay", c.ineq_decay, "ineq.decay");
  }
  if (const json* o = find(j, "out")) {
    check_keys(*o, {"csv", "json"}, "out");
    c.out_csv = str_or(*o, "csv", c.out_csv, "out.csv");
    c.out_json = str_or(*o, "json", c.out_json, "out.json");
  }

  if (!(c.L > 0.0)) fail("grid.L must be > 0");
  if (!(c.Y > 0.0)) fail("grid.Y must be > 0");
  if (c.nx < 3 || c.ny < 3 || c.nx > 8192 || c.ny > 8192)
    fail("grid.nx and grid.ny must lie in [3, 8192]");
  if (!(c.Pr > 0.0)) fail("phys.Pr must be > 0");
  if (c.ic_kind != "eigenmode" && c.ic_kind != "gaussian-bump" &&
      c.ic_kind != "random")
    fail("ic.kind must be eigenmode, gaussian-bump or random");
  if (!(c.ic_R > 0.0)) fail("ic.R must be > 0");
  if (!(c.ic_y_extent > 0.0)) fail("ic.y_extent must be > 0");
  if (c.forcing_kind != "none" && c.forcing_kind != "bump")
    fail("forcing.kind must be none or bump");
  if (c.forcing_amp < 0.0) fail("forcing.amp must be >= 0");
  if (!(c.forcing_y_extent > 0.0)) fail("forcing.y_extent must be > 0");
  if (!(c.dt > 0.0)) fail("time.dt must be > 0");
  if (!(c.t_end >= c.dt)) fail("time.t_end must be >= time.dt");
  if (c.sample_every < 1) fail("sample.every must be >= 1");
  for (double k : c.tail_ks)
    if (!(k > 0.0)) fail("tail.ks must be positive");
  std::sort(c.tail_ks.begin(), c.tail_ks.end());
  if (std::adjacent_find(c.tail_ks.begin(), c.tail_ks.end()) != c.tail_ks.end())
    fail("tail.ks must be distinct");
  if (!(c.tail_eps > 0.0)) fail("tail.eps must be > 0");
  if (c.absorb_R.size() < 2) fail("absorb.R_ladder needs at least two entries");
  for (double r : c.absorb_R)
    if (!(r > 0.0)) fail("absorb.R_ladder must be positive");
  std::sort(c.absorb_R.begin(), c.absorb_R.end());
  if (std::adjacent_find(c.absorb_R.begin(), c.absorb_R.end()) != c.absorb_R.end())
    fail("absorb.R_ladder must be distinct");
  if (c.ineq_samples < 1 || c.ineq_samples > 100000)
    fail("ineq.samples must lie in [1, 100000]");
  if (c.ineq_modes < 1 || c.ineq_modes > 64)
    fail("ineq.modes must lie in [1, 64]");
  if (c.ineq_decay < 0.0) fail("ineq.decay must be >= 0");
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_config(j);
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
  // Output paths are deliberately excluded: they do not influence results.
  std::string canon = cfg.scenario + "|" + cfg.ic_kind + "|" + cfg.forcing_kind + "|";
  char buf[64];
  auto add = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g;", v);
    canon += buf;
  };
  auto addu = [&](std::uint64_t v) {
    std::snprintf(buf, sizeof buf, "%llu;", static_cast<unsigned long long>(v));
    canon += buf;
  };
  add(cfg.L);
  add(cfg.Y);
  addu(cfg.nx);
  addu(cfg.ny);
  add(cfg.Pr);
  add(cfg.Ra);
  add(cfg.ic_R);
  addu(cfg.ic_seed);
  add(cfg.ic_y_extent);
  add(cfg.forcing_amp);
  add(cfg.forcing_y_extent);
  add(cfg.dt);
  add(cfg.t_end);
  addu(static_cast<std::uint64_t>(cfg.sample_every));
  for (double k : cfg.tail_ks) add(k);
  add(cfg.tail_eps);
  for (double r : cfg.absorb_R) add(r);
  addu(cfg.ineq_samples);
  addu(cfg.ineq_modes);
  add(cfg.ineq_decay);

  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char b : canon) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

std::optional<double> entry_time(
    const std::vector<std::pair<double, double>>& series, double threshold) {
  if (series.empty()) throw std::invalid_argument("entry_time: empty series");
  std::size_t last = series.size();
  for (std::size_t i = 0; i < series.size(); ++i)
    if (series[i].second > threshold) last = i;
  if (last == series.size()) return series.front().first;
  if (last + 1 == series.size()) return std::nullopt;
  return series[last + 1].first;
}

LineFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("linear_fit: need matched series, length >= 2");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (f.intercept + f.slope * xs[i]);
    ssr += e * e;
    sst += (ys[i] - my) * (ys[i] - my);
  }
  f.r2 = sst > 0.0 ? 1.0 - ssr / sst : (ssr == 0.0 ? 1.0 : 0.0);
  return f;
}

namespace {

// x-sinusoidal, y-localized bump; effectively compact in y for sigma << Y.
ScalarField bump_profile(const GridSpec& grid, int kx, double sigma) {
  ScalarField out(grid);
  for (std::size_t j = 0; j < grid.ny; ++j) {
    const double w = std::exp(-sq(grid.y(j) / sigma));
    for (std::size_t i = 0; i < grid.nx; ++i)
      out(i, j) = std::sin(kx * std::numbers::pi * grid.x(i) / grid.L) * w;
  }
  return out;
}

void scale_to(ScalarField& a, double R) {
  const double n = l2_norm(a);
  if (n == 0.0) return;
  const double s = R / n;
  for (std::size_t k = 0; k < a.grid().size(); ++k) a.data()[k] *= s;
}

State random_initial(const GridSpec& grid, std::uint64_t seed, double R,
                     const SolverPlan& plan) {
  State s = make_state(grid);
  s.xi = random_field(seed + 1, grid, 8, 2.0);
  s.theta = random_field(seed, grid, 8, 2.0);
  scale_to(s.xi, R);
  scale_to(s.theta, R);
  s.psi = solve_poisson(plan, s.xi);
  return s;
}

State build_initial(const ScenarioConfig& cfg, const GridSpec& grid,
                    const SolverPlan& plan) {
  if (cfg.ic_kind == "random")
    return random_initial(grid, cfg.ic_seed, cfg.ic_R, plan);
  State s = make_state(grid);
  if (cfg.ic_kind == "eigenmode") {
    s.xi = eigenmode_field(grid);
    s.theta = eigenmode_field(grid);
  } else {  // gaussian-bump
    s.xi = bump_profile(grid, 1, cfg.ic_y_extent);
    s.theta = bump_profile(grid, 2, cfg.ic_y_extent);
  }
  scale_to(s.xi, cfg.ic_R);
  scale_to(s.theta, cfg.ic_R);
  s.psi = solve_poisson(plan, s.xi);
  return s;
}

void apply_forcing(Params& p, const ScenarioConfig& cfg, const GridSpec& grid) {
  if (cfg.forcing_kind == "none" || cfg.forcing_amp == 0.0) return;
  p.f = bump_profile(grid, 2, cfg.forcing_y_extent);
  p.g = bump_profile(grid, 1, cfg.forcing_y_extent);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    p.f.data()[k] *= cfg.forcing_amp;
    p.g.data()[k] *= cfg.forcing_amp;
  }
}

struct Traj {
  std::vector<DiagRecord> recs;
  State final_state;
};

Traj run_traj(const Params& params, const State& s0, const StepperConfig& scfg,
              const std::vector<double>& ks, long every, const std::string& csv) {
  if (!csv.empty()) std::remove(csv.c_str());
  SolverPlan plan(s0.xi.grid());
  StepperMemory mem;
  DiagCollector col(&params, ks, csv);
  Observer obs{every, std::ref(col)};
  State fin = integrate(s0, params, scfg, mem, plan,
                        std::span<const Observer>(&obs, 1));
  col.finish();
  return {col.records(), std::move(fin)};
}

std::vector<std::pair<double, double>> transform_series(
    const std::vector<DiagRecord>& recs,
    const std::function<double(const DiagRecord&)>& f) {
  std::vector<std::pair<double, double>> out;
  out.reserve(recs.size());
  for (const DiagRecord& r : recs) out.emplace_back(r.t, f(r));
  return out;
}

// Consecutive unit-width window integrals of a sampled series starting at
// t0, as many as fit before the series ends.
std::vector<double> window_ladder(
    const std::vector<std::pair<double, double>>& series, double t0) {
  std::vector<double> out;
  for (double t = t0; t + 1.0 <= series.back().first + 1e-9; t += 1.0)
    out.push_back(windowed_integral(series, t, 1.0));
  return out;
}

double max_pair_deviation(const std::vector<double>& ws) {
  double dev = 0.0;
  for (std::size_t i = 0; i + 1 < ws.size(); ++i) {
    const double mid = 0.5 * (ws[i] + ws[i + 1]);
    if (mid > 0.0) dev = std::max(dev, std::fabs(ws[i + 1] - ws[i]) / mid);
  }
  return dev;
}

struct SlopeCheck {
  double slope = 0.0;
  double mean = 0.0;
  double sup = 0.0;
  bool pass = false;
};

SlopeCheck trend_check(const std::vector<std::pair<double, double>>& series,
                       double t_from) {
  std::vector<double> xs, ys;
  SlopeCheck out;
  for (const auto& [t, v] : series)
    if (t >= t_from) {
      xs.push_back(t);
      ys.push_back(v);
      out.mean += v;
      out.sup = std::max(out.sup, v);
    }
  if (xs.size() < 3) return out;
  out.mean /= static_cast<double>(xs.size());
  out.slope = linear_fit(xs, ys).slope;
  out.pass = out.slope <= 1e-3 * out.mean;
  return out;
}

json slope_json(const SlopeCheck& c) {
  return json{{"slope", c.slope}, {"mean", c.mean}, {"sup", c.sup}, {"pass", c.pass}};
}

}  // namespace

RunResult run_decay(const ScenarioConfig& cfg) {
  const GridSpec grid = make_grid(cfg.L, cfg.Y, cfg.nx, cfg.ny);
  const double mu1 = mu1_h(grid);
  SolverPlan plan(grid);
  json rep;
  rep["scenario"] = "decay";
  rep["config_hash"] = config_hash(cfg);
  rep["mu1_h"] = mu1;

  StepperConfig scfg;
  scfg.dt = cfg.dt;
  scfg.t_end = cfg.t_end;

  // Forcing is ignored here by design: all three decay checks are statements
  // about the unforced semigroup.
  Params p;
  p.Pr = cfg.Pr;
  p.Ra = cfg.Ra;

  // (a) principal-eigenmode vorticity with theta = 0; the fitted decay rate
  // of ||xi|| must equal the discrete eigenvalue.
  State sa = make_state(grid);
  sa.xi = eigenmode_field(grid);
  scale_to(sa.xi, cfg.ic_R);
  sa.psi = solve_poisson(plan, sa.xi);
  Traj ta = run_traj(p, sa, scfg, cfg.tail_ks, cfg.sample_every, cfg.out_csv);
  std::vector<double> xs, ys;
  for (const DiagRecord& r : ta.recs)
    if (r.l2_xi > 0.0) {
      xs.push_back(r.t);
      ys.push_back(std::log(r.l2_xi));
    }
  const LineFit fit = linear_fit(xs, ys);
  const double rate = -fit.slope;
  const double rate_err = std::fabs(rate - mu1) / mu1;
  const bool pass_rate = rate_err <= 5e-3;
  rep["eigenmode"] = {{"rate_fit", rate},
                      {"rate_rel_err", rate_err},
                      {"fit_r2", fit.r2},
                      {"pass", pass_rate}};

  // (b) energy envelope for the configured initial data.
  State sb = build_initial(cfg, grid, plan);
  Traj tb = run_traj(p, sb, scfg, {}, cfg.sample_every, "");
  const double E0 = sq(tb.recs.front().l2_theta);
  const double t0 = tb.recs.front().t;
  double max_ratio = 0.0;
  bool pass_env = true;
  for (const DiagRecord& r : tb.recs) {
    const double env = E0 * std::exp(-2.0 * mu1 * (r.t - t0) / cfg.Pr);
    if (env > 0.0) {
      max_ratio = std::max(max_ratio, sq(r.l2_theta) / env);
    } else if (sq(r.l2_theta) > 0.0) {
      pass_env = false;
    }
  }
  pass_env = pass_env && max_ratio <= 1.0 + 1e-6;
  rep["envelope"] = {{"max_ratio", max_ratio}, {"pass", pass_env}};

  // (c) zero data must stay exactly zero, sample for sample.
  StepperConfig scfg_zero = scfg;
  scfg_zero.t_end = std::min(cfg.t_end, 2.0);
  Traj tc = run_traj(p, make_state(grid), scfg_zero, {}, cfg.sample_every, "");
  bool pass_zero = true;
  for (const DiagRecord& r : tc.recs)
    pass_zero = pass_zero && r.l2_xi == 0.0 && r.l2_theta == 0.0;
  rep["zero"] = {{"pass", pass_zero}};

  const bool pass = pass_rate && pass_env && pass_zero;
  rep["pass"] = pass;
  return {pass, rep};
}

RunResult run_absorb(const ScenarioConfig& cfg) {
  const GridSpec grid = make_grid(cfg.L, cfg.Y, cfg.nx, cfg.ny);
  SolverPlan plan(grid);
  json rep;
  rep["scenario"] = "absorb";
  rep["config_hash"] = config_hash(cfg);

  Params p;
  p.Pr = cfg.Pr;
  p.Ra = cfg.Ra;
  apply_forcing(p, cfg, grid);

  StepperConfig scfg;
  scfg.dt = cfg.dt;
  scfg.t_end = cfg.t_end;
  scfg.adaptive = true;

  struct Run {
    double R;
    std::uint64_t seed;
    bool in_fit;
    Traj traj;
    std::vector<std::pair<double, double>> N;
    double Nlim = 0.0;
    std::optional<double> t1;
  };
  std::vector<Run> runs;
  const double R_mid = cfg.absorb_R[cfg.absorb_R.size() / 2];
  for (double R : cfg.absorb_R) runs.push_back({R, cfg.ic_seed, true, {}, {}, 0.0, {}});
  // One repeated-R run under a different seed, reported for context.
  runs.push_back({R_mid, cfg.ic_seed + 1, false, {}, {}, 0.0, {}});

  std::size_t base_idx = 0;
  for (std::size_t i = 0; i < runs.size(); ++i)
    if (runs[i].in_fit && runs[i].R == R_mid) base_idx = i;

  for (std::size_t i = 0; i < runs.size(); ++i) {
    Run& r = runs[i];
    State s0 = random_initial(grid, r.seed, r.R, plan);
    r.traj = run_traj(p, s0, scfg, cfg.tail_ks, cfg.sample_every,
                      i == base_idx ? cfg.out_csv : "");
    r.N = transform_series(r.traj.recs, [](const DiagRecord& d) {
      return d.l2_xi + d.l2_theta;
    });
    for (const auto& [t, v] : r.N)
      if (t >= 0.75 * cfg.t_end) r.Nlim = std::max(r.Nlim, v);
  }

  double nl_min = runs.front().Nlim, nl_max = runs.front().Nlim;
  for (const Run& r : runs) {
    nl_min = std::min(nl_min, r.Nlim);
    nl_max = std::max(nl_max, r.Nlim);
  }
  const double ball = 1.05 * nl_max;
  rep["ball"] = ball;
  rep["Nlim_spread"] = nl_min > 0.0 ? nl_max / nl_min : 0.0;

  bool all_enter = true;
  bool none_exit = true;
  json jruns = json::array();
  for (Run& r : runs) {
    r.t1 = entry_time(r.N, ball);
    if (!r.t1) {
      all_enter = false;
    } else {
      for (const auto& [t, v] : r.N)
        if (t >= *r.t1 && v > ball) none_exit = false;
    }
    jruns.push_back({{"R", r.R},
                     {"seed", r.seed},
                     {"Nlim", r.Nlim},
                     {"t1", r.t1 ? json(*r.t1) : json()}});
  }
  rep["runs"] = jruns;

  // Entry time against ln R over the ladder members that start outside the
  // ball.
  std::vector<double> lx, lt;
  for (const Run& r : runs)
    if (r.in_fit && r.t1 && *r.t1 > 0.0) {
      lx.push_back(std::log(r.R));
      lt.push_back(*r.t1);
    }
  bool pass_fit = false;
  if (lx.size() >= 3) {
    const LineFit f = linear_fit(lx, lt);
    pass_fit = f.r2 >= 0.95;
    rep["entry_fit"] = {{"points", lx.size()},
                        {"slope", f.slope},
                        {"intercept", f.intercept},
                        {"r2", f.r2},
                        {"pass", pass_fit}};
  } else {
    rep["entry_fit"] = {{"points", lx.size()}, {"pass", false}};
  }
  if (runs[base_idx].t1 && runs.back().t1) {
    const double a = *runs[base_idx].t1, b = *runs.back().t1;
    rep["seed_variant_t1"] = {{"base", a},
                              {"variant", b},
                              {"rel_diff", std::fabs(a - b) / std::max({a, b, 1.0})}};
  }

  // Post-entry unit windows and trend slopes on the mid-ladder run; both are
  // statements about the settled regime, so they start at the entry time.
  const Run& base = runs[base_idx];
  bool pass_windows = false;
  bool pass_slopes = false;
  if (base.t1) {
    const double t_start = std::ceil(*base.t1);
    struct WinSeries {
      const char* name;
      std::function<double(const DiagRecord&)> f;
    };
    const WinSeries wdefs[] = {
        {"grad_xi_sq", [](const DiagRecord& d) { return sq(d.h1_xi); }},
        {"grad_theta_sq", [](const DiagRecord& d) { return sq(d.h1_theta); }},
        {"lap_xi_sq", [](const DiagRecord& d) { return sq(d.lap_xi); }},
        {"lap_theta_sq", [](const DiagRecord& d) { return sq(d.lap_theta); }},
    };
    pass_windows = true;
    double M2 = 0.0, M3 = 0.0;
    json jw;
    for (const WinSeries& w : wdefs) {
      const auto series = transform_series(base.traj.recs, w.f);
      const std::vector<double> ws = window_ladder(series, t_start);
      if (ws.size() < 2) {
        pass_windows = false;
        continue;
      }
      const double dev = max_pair_deviation(ws);
      const double wmax = *std::max_element(ws.begin(), ws.end());
      const bool grad = std::string(w.name).rfind("grad", 0) == 0;
      (grad ? M2 : M3) = std::max(grad ? M2 : M3, wmax);
      const bool ok = dev < 0.30;
      pass_windows = pass_windows && ok;
      jw[w.name] = {{"windows", ws.size()},
                    {"max_consecutive_dev", dev},
                    {"max", wmax},
                    {"pass", ok}};
    }
    // Unsquared companions, reported alongside the primary squared bounds.
    double M2u = 0.0, M3u = 0.0;
    for (const auto& [name, f] :
         {std::pair<const char*, std::function<double(const DiagRecord&)>>{
              "grad", [](const DiagRecord& d) { return d.h1_xi + d.h1_theta; }},
          {"lap", [](const DiagRecord& d) { return d.lap_xi + d.lap_theta; }}}) {
      const auto series = transform_series(base.traj.recs, f);
      const std::vector<double> ws = window_ladder(series, t_start);
      if (!ws.empty()) {
        const double m = *std::max_element(ws.begin(), ws.end());
        (std::string(name) == "grad" ? M2u : M3u) = m;
      }
    }
    rep["windows"] = jw;
    rep["M2_sq"] = M2;
    rep["M3_sq"] = M3;
    rep["M2_unsq"] = M2u;
    rep["M3_unsq"] = M3u;

    const SlopeCheck sc_lap_xi =
        trend_check(transform_series(base.traj.recs,
                                     [](const DiagRecord& d) { return d.lap_xi; }),
                    t_start);
    const SlopeCheck sc_lap_th =
        trend_check(transform_series(base.traj.recs,
                                     [](const DiagRecord& d) { return d.lap_theta; }),
                    t_start);
    const SlopeCheck sc_dxi = trend_check(
        DiagCollector::series(base.traj.recs, &DiagRecord::dxi_dt), t_start);
    const SlopeCheck sc_dth = trend_check(
        DiagCollector::series(base.traj.recs, &DiagRecord::dtheta_dt), t_start);
    pass_slopes = sc_lap_xi.pass && sc_lap_th.pass && sc_dxi.pass && sc_dth.pass;
    rep["trends"] = {{"lap_xi", slope_json(sc_lap_xi)},
                     {"lap_theta", slope_json(sc_lap_th)},
                     {"dxi_dt", slope_json(sc_dxi)},
                     {"dtheta_dt", slope_json(sc_dth)}};
  }

  const bool pass = all_enter && none_exit && pass_fit && pass_windows && pass_slopes;
  rep["all_enter"] = all_enter;
  rep["none_exit"] = none_exit;
  rep["pass_windows"] = pass_windows;
  rep["pass_trends"] = pass_slopes;
  rep["pass"] = pass;
  return {pass, rep};
}

RunResult run_tail(const ScenarioConfig& cfg) {
  if (cfg.tail_ks.empty()) fail("tail.ks is required for the tail scenario");
  const GridSpec grid = make_grid(cfg.L, cfg.Y, cfg.nx, cfg.ny);
  SolverPlan plan(grid);
  json rep;
  rep["scenario"] = "tail";
  rep["config_hash"] = config_hash(cfg);

  Params p;
  p.Pr = cfg.Pr;
  p.Ra = cfg.Ra;
  apply_forcing(p, cfg, grid);

  // One run to 2 t_end at fixed dt; the prefix t <= t_end is sample for
  // sample what a t_end run would produce, so the k0-stability check
  // compares the doubled horizon against a true t_end run for free.
  StepperConfig scfg;
  scfg.dt = cfg.dt;
  scfg.t_end = 2.0 * cfg.t_end;

  State s0 = build_initial(cfg, grid, plan);
  Traj tr = run_traj(p, s0, scfg, cfg.tail_ks, cfg.sample_every, cfg.out_csv);

  const std::size_t nk = cfg.tail_ks.size();
  std::vector<std::vector<std::pair<double, double>>> mass(nk);
  bool monotone = true;
  for (const DiagRecord& r : tr.recs) {
    for (std::size_t q = 0; q < nk; ++q) {
      mass[q].emplace_back(r.t, r.tail[q].second);
      if (q > 0 && r.tail[q].second > r.tail[q - 1].second +
                       1e-12 * std::max(1.0, r.tail[q - 1].second))
        monotone = false;
    }
  }

  auto smallest_k = [&](double horizon) {
    struct Res {
      std::optional<std::size_t> idx;
      std::optional<double> t3;
    } res;
    for (std::size_t q = 0; q < nk; ++q) {
      std::vector<std::pair<double, double>> pre;
      for (const auto& s : mass[q])
        if (s.first <= horizon + 1e-9) pre.push_back(s);
      if (pre.empty()) break;
      const std::optional<double> t3 = entry_time(pre, cfg.tail_eps);
      if (t3) {
        res.idx = q;
        res.t3 = t3;
        break;
      }
    }
    return res;
  };

  const auto at_T = smallest_k(cfg.t_end);
  const auto at_2T = smallest_k(2.0 * cfg.t_end);

  json jks = json::array();
  for (std::size_t q = 0; q < nk; ++q) {
    const std::optional<double> t3q = entry_time(mass[q], cfg.tail_eps);
    jks.push_back({{"k", cfg.tail_ks[q]},
                   {"t3", t3q ? json(*t3q) : json()},
                   {"final_mass", mass[q].back().second}});
  }
  rep["ladder"] = jks;

  bool pass_found = at_T.idx.has_value() && at_2T.idx.has_value();
  bool pass_stable = pass_found && *at_T.idx == *at_2T.idx;
  double k0 = 0.0, t3 = 0.0;
  bool pass_small = false;
  bool pass_hold = false;
  if (pass_found) {
    k0 = cfg.tail_ks[*at_2T.idx];
    t3 = *at_2T.t3;
    pass_small = k0 < cfg.Y / std::numbers::sqrt2;
    // Every ladder radius at or beyond k0 must stay under eps from t3 on.
    pass_hold = true;
    for (std::size_t q = *at_2T.idx; q < nk; ++q)
      for (const auto& [t, m] : mass[q])
        if (t >= t3 && m > cfg.tail_eps) pass_hold = false;
  }
  rep["k0"] = pass_found ? json(k0) : json();
  rep["t3"] = pass_found ? json(t3) : json();
  rep["k0_at_t_end"] =
      at_T.idx ? json(cfg.tail_ks[*at_T.idx]) : json();
  rep["k0_stable_under_doubling"] = pass_stable;
  rep["k0_below_Y_over_sqrt2"] = pass_small;
  rep["monotone_in_k"] = monotone;
  rep["holds_from_t3"] = pass_hold;

  const bool pass = pass_found && pass_stable && pass_small && monotone && pass_hold;
  rep["pass"] = pass;
  return {pass, rep};
}

RunResult run_regularity(const ScenarioConfig& cfg) {
  const GridSpec grid = make_grid(cfg.L, cfg.Y, cfg.nx, cfg.ny);
  SolverPlan plan(grid);
  json rep;
  rep["scenario"] = "regularity";
  rep["config_hash"] = config_hash(cfg);

  Params p;
  p.Pr = cfg.Pr;
  p.Ra = cfg.Ra;
  apply_forcing(p, cfg, grid);

  StepperConfig scfg;
  scfg.dt = cfg.dt;
  scfg.t_end = cfg.t_end;

  State s0 = build_initial(cfg, grid, plan);
  Traj tr = run_traj(p, s0, scfg, cfg.tail_ks, cfg.sample_every, cfg.out_csv);

  const double t_from = 0.5 * cfg.t_end;
  const SlopeCheck lap_xi =
      trend_check(transform_series(tr.recs,
                                   [](const DiagRecord& d) { return d.lap_xi; }),
                  t_from);
  const SlopeCheck lap_th =
      trend_check(transform_series(tr.recs,
                                   [](const DiagRecord& d) { return d.lap_theta; }),
                  t_from);
  const SlopeCheck dxi =
      trend_check(DiagCollector::series(tr.recs, &DiagRecord::dxi_dt), t_from);
  const SlopeCheck dth =
      trend_check(DiagCollector::series(tr.recs, &DiagRecord::dtheta_dt), t_from);

  double res_th = 0.0, res_xi = 0.0;
  for (const DiagRecord& r : tr.recs) {
    if (r.energy_residual_theta) res_th = std::max(res_th, *r.energy_residual_theta);
    if (r.energy_residual_xi) res_xi = std::max(res_xi, *r.energy_residual_xi);
  }
  rep["trends"] = {{"lap_xi", slope_json(lap_xi)},
                   {"lap_theta", slope_json(lap_th)},
                   {"dxi_dt", slope_json(dxi)},
                   {"dtheta_dt", slope_json(dth)}};
  rep["max_energy_residual_theta"] = res_th;
  rep["max_energy_residual_xi"] = res_xi;

  const bool pass = lap_xi.pass && lap_th.pass && dxi.pass && dth.pass;
  rep["pass"] = pass;
  return {pass, rep};
}

namespace {

// Manufactured fields: a two-mode streamfunction and a detuned temperature,
// all factors vanishing on the boundary.
struct Mms {
  double a, b, K, Ra, Pr;

  explicit Mms(const GridSpec& g, double Ra_, double Pr_)
      : a(std::numbers::pi / g.L),
        b(std::numbers::pi / (2.0 * g.Y)),
        K(a * a + b * b),
        Ra(Ra_),
        Pr(Pr_) {}

  struct Point {
    double psi, psix, psiy, xi, xit, xix, xiy, lapxi;
    double th, tht, thx, thy, lapth;
  };

  Point eval(double x, double yhat, double t) const {
    const double c = std::cos(2.0 * t), dc = std::cos(2.0 * t + 0.7);
    const double sa = std::sin(a * x), ca = std::cos(a * x);
    const double s2a = std::sin(2.0 * a * x), c2a = std::cos(2.0 * a * x);
    const double sb = std::sin(b * yhat), cb = std::cos(b * yhat);
    const double s2b = std::sin(2.0 * b * yhat), c2b = std::cos(2.0 * b * yhat);
    Point p;
    p.psi = c * (sa * sb + 0.5 * s2a * s2b);
    p.psix = c * a * (ca * sb + c2a * s2b);
    p.psiy = c * b * (sa * cb + s2a * c2b);
    p.xi = -K * c * (sa * sb + 2.0 * s2a * s2b);
    p.xit = 2.0 * K * std::sin(2.0 * t) * (sa * sb + 2.0 * s2a * s2b);
    p.xix = -K * c * a * (ca * sb + 4.0 * c2a * s2b);
    p.xiy = -K * c * b * (sa * cb + 4.0 * s2a * c2b);
    p.lapxi = K * K * c * (sa * sb + 8.0 * s2a * s2b);
    p.th = dc * sa * s2b;
    p.tht = -2.0 * std::sin(2.0 * t + 0.7) * sa * s2b;
    p.thx = dc * a * ca * s2b;
    p.thy = dc * 2.0 * b * sa * c2b;
    p.lapth = -dc * (a * a + 4.0 * b * b) * sa * s2b;
    return p;
  }

  void fill_state(State& s, const GridSpec& g, double t) const {
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t i = 0; i < g.nx; ++i) {
        const Point p = eval(g.x(i), g.y(j) + g.Y, t);
        s.xi(i, j) = p.xi;
        s.theta(i, j) = p.th;
        s.psi(i, j) = p.psi;
      }
    s.t = t;
  }

  void fill_sources(Params& prm, const GridSpec& g, double t) const {
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t i = 0; i < g.nx; ++i) {
        const Point p = eval(g.x(i), g.y(j) + g.Y, t);
        prm.f(i, j) = p.xit - p.lapxi + (p.psiy * p.xix - p.psix * p.xiy) +
                      (Ra / Pr) * p.thx;
        prm.g(i, j) = p.tht - p.lapth / Pr + (p.psiy * p.thx - p.psix * p.thy);
      }
  }

  std::pair<double, double> max_err(const State& s, const GridSpec& g) const {
    double exi = 0.0, eth = 0.0;
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t i = 0; i < g.nx; ++i) {
        const Point p = eval(g.x(i), g.y(j) + g.Y, s.t);
        exi = std::max(exi, std::fabs(s.xi(i, j) - p.xi));
        eth = std::max(eth, std::fabs(s.theta(i, j) - p.th));
      }
    return {exi, eth};
  }
};

State mms_run(const GridSpec& grid, double Ra, double Pr, double dt,
              long n_steps) {
  const Mms mms(grid, Ra, Pr);
  Params p;
  p.Pr = Pr;
  p.Ra = Ra;
  p.f = ScalarField(grid);
  p.g = ScalarField(grid);
  State s = make_state(grid);
  mms.fill_state(s, grid, 0.0);
  StepperConfig scfg;
  scfg.dt = dt;
  SolverPlan plan(grid);
  StepperMemory mem;
  for (long n = 0; n < n_steps; ++n) {
    mms.fill_sources(p, grid, s.t);
    s = step(s, p, scfg, mem, plan);
  }
  return s;
}

}  // namespace

RunResult run_convergence(const ScenarioConfig& cfg) {
  json rep;
  rep["scenario"] = "convergence";
  rep["config_hash"] = config_hash(cfg);

  // Spatial ladder: four dx-halvings at a dt small enough that the O(dt^2)
  // floor sits far below the coarsest spatial error.
  const std::size_t ladder[] = {31, 63, 127, 255};
  std::vector<double> lh, lexi, leth;
  json jspace = json::array();
  for (std::size_t n : ladder) {
    const GridSpec g = make_grid(cfg.L, cfg.Y, n, n);
    const long steps = std::lround(cfg.t_end / cfg.dt);
    const State s = mms_run(g, cfg.Ra, cfg.Pr, cfg.dt, steps);
    const Mms mms(g, cfg.Ra, cfg.Pr);
    const auto [exi, eth] = mms.max_err(s, g);
    lh.push_back(std::log(g.dx));
    lexi.push_back(std::log(exi));
    leth.push_back(std::log(eth));
    jspace.push_back({{"n", n}, {"dx", g.dx}, {"err_xi", exi}, {"err_theta", eth}});
  }
  const double sx_xi = linear_fit(lh, lexi).slope;
  const double sx_th = linear_fit(lh, leth).slope;
  rep["spatial"] = {{"ladder", jspace},
                    {"slope_xi", sx_xi},
                    {"slope_theta", sx_th}};

  // Temporal ladder on one grid, errors against a fine-dt run of the same
  // discretization so the spatial floor cancels.
  const GridSpec g = make_grid(cfg.L, cfg.Y, cfg.nx, cfg.ny);
  const Mms mms(g, cfg.Ra, cfg.Pr);
  const State ref = mms_run(g, cfg.Ra, cfg.Pr, cfg.t_end / 1024.0, 1024);
  std::vector<double> ldt, texi, teth;
  json jtime = json::array();
  for (long div : {16L, 32L, 64L, 128L}) {
    const double dt = cfg.t_end / static_cast<double>(div);
    const State s = mms_run(g, cfg.Ra, cfg.Pr, dt, div);
    double exi = 0.0, eth = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      exi = std::max(exi, std::fabs(s.xi.data()[k] - ref.xi.data()[k]));
      eth = std::max(eth, std::fabs(s.theta.data()[k] - ref.theta.data()[k]));
    }
    ldt.push_back(std::log(dt));
    texi.push_back(std::log(exi));
    teth.push_back(std::log(eth));
    jtime.push_back({{"dt", dt}, {"err_xi", exi}, {"err_theta", eth}});
  }
  const double st_xi = linear_fit(ldt, texi).slope;
  const double st_th = linear_fit(ldt, teth).slope;
  rep["temporal"] = {{"ladder", jtime},
                     {"slope_xi", st_xi},
                     {"slope_theta", st_th}};

  const bool pass = sx_xi >= 1.8 && sx_th >= 1.8 && st_xi >= 1.8 && st_th >= 1.8;
  rep["pass"] = pass;
  return {pass, rep};
}

RunResult run_inequalities(const ScenarioConfig& cfg) {
  json rep;
  rep["scenario"] = "inequalities";
  rep["config_hash"] = config_hash(cfg);

  struct SweepOut {
    double lady = 0.0, jac1 = 0.0, jac2 = 0.0;
    bool sharp = false;
    bool all_pass = true;
    json j;
  };

  auto sweep = [&](const GridSpec& grid) {
    SweepOut out;
    std::vector<SeededField> fields;
    fields.push_back({0, eigenmode_field(grid)});
    for (std::uint64_t s = 1; s <= cfg.ineq_samples; ++s)
      fields.push_back({s, random_field(s, grid, cfg.ineq_modes, cfg.ineq_decay)});

    const IneqReport poin = check_poincare(fields);
    const double lambda_est = poin.max_constant;
    const IneqReport lady = check_ladyzhenskaya(fields);
    const double kcut = cfg.tail_ks.empty() ? 1.0 : cfg.tail_ks.front();
    const CutoffCheck cut = check_cutoff_poincare(fields, kcut, lambda_est);

    std::vector<SeededPair> pairs;
    pairs.push_back({0, eigenmode_field(grid), eigenmode_field(grid)});
    for (std::uint64_t s = 1; s <= cfg.ineq_samples; ++s)
      pairs.push_back({s, random_field(s, grid, cfg.ineq_modes, cfg.ineq_decay),
                       random_field(s + cfg.ineq_samples + 1, grid,
                                    cfg.ineq_modes, cfg.ineq_decay)});
    const std::vector<IneqReport> jac = check_jacobian_bounds(pairs);

    const ScalarField e = eigenmode_field(grid);
    const double lambda_eig = l2_norm(e) / h1_seminorm(e);
    const double target = 1.0 / std::sqrt(mu1_h(grid));
    out.sharp = std::fabs(lambda_eig - target) <= 1e-10 * target;

    out.lady = lady.max_constant;
    out.jac1 = jac[0].max_constant;
    out.jac2 = jac[1].max_constant;
    out.all_pass = poin.pass && lady.pass && cut.report.pass && jac[0].pass &&
                   jac[1].pass;
    out.j = {{"grid", {{"nx", grid.nx}, {"ny", grid.ny}}},
             {"lambda_est", lambda_est},
             {"poincare", to_json(poin)},
             {"ladyzhenskaya", to_json(lady)},
             {"cutoff_poincare", to_json(cut.report)},
             {"cutoff_notes", cut.notes},
             {"jacobian_one_star", to_json(jac[0])},
             {"jacobian_two_star", to_json(jac[1])},
             {"eigenmode_lambda", lambda_eig},
             {"eigenmode_lambda_target", target},
             {"eigenmode_sharp", out.sharp}};
    return out;
  };

  if (cfg.nx / 2 < 3 || cfg.ny / 2 < 3)
    fail("grid too small for the half-resolution sweep");
  const SweepOut full = sweep(make_grid(cfg.L, cfg.Y, cfg.nx, cfg.ny));
  const SweepOut half = sweep(make_grid(cfg.L, cfg.Y, cfg.nx / 2, cfg.ny / 2));

  auto drift = [](double a, double b) {
    const double m = std::max(std::fabs(a), std::fabs(b));
    return m > 0.0 ? std::fabs(a - b) / m : 0.0;
  };
  const double d_lady = drift(full.lady, half.lady);
  const double d_j1 = drift(full.jac1, half.jac1);
  const double d_j2 = drift(full.jac2, half.jac2);
  const bool stable = d_lady <= 0.10 && d_j1 <= 0.10 && d_j2 <= 0.10;

  rep["full"] = full.j;
  rep["half"] = half.j;
  rep["drift"] = {{"ladyzhenskaya", d_lady},
                  {"jacobian_one_star", d_j1},
                  {"jacobian_two_star", d_j2},
                  {"pass", stable}};

  const bool pass =
      full.sharp && half.sharp && stable && full.all_pass && half.all_pass;
  rep["pass"] = pass;
  return {pass, rep};
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  RunResult r;
  if (cfg.scenario == "decay")
    r = run_decay(cfg);
  else if (cfg.scenario == "absorb")
    r = run_absorb(cfg);
  else if (cfg.scenario == "tail")
    r = run_tail(cfg);
  else if (cfg.scenario == "regularity")
    r = run_regularity(cfg);
  else if (cfg.scenario == "convergence")
    r = run_convergence(cfg);
  else if (cfg.scenario == "inequalities")
    r = run_inequalities(cfg);
  else
    fail("unknown scenario " + cfg.scenario);

  if (!cfg.out_json.empty()) {
    std::ofstream out(cfg.out_json);
    if (!out)
      throw std::runtime_error("cannot open " + cfg.out_json);
    out << r.report.dump(2) << '\n';
  }
  return r;
}

}  // namespace nbch
