#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include <nlohmann/json.hpp>

#include "nbch/diagnostics.hpp"
#include "nbch/experiments.hpp"
#include "nbch/inequalities.hpp"
#include "nbch/norms.hpp"
#include "nbch/operators.hpp"
#include "nbch/poisson.hpp"
#include "nbch/stepper.hpp"

using namespace nbch;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

json full_config() {
  return json{
      {"scenario", "decay"},
      {"grid", {{"L", 2.0}, {"Y", 1.5}, {"nx", 63}, {"ny", 31}}},
      {"phys", {{"Pr", 0.8}, {"Ra", 12.0}}},
      {"ic", {{"kind", "random"}, {"R", 2.5}, {"seed", 11}, {"y_extent", 0.4}}},
      {"forcing", {{"kind", "bump"}, {"amp", 0.3}, {"y_extent", 1.2}}},
      {"time", {{"dt", 5e-4}, {"t_end", 2.0}}},
      {"sample", {{"every", 4}}},
      {"tail", {{"ks", {2.0, 1.0, 3.0}}, {"eps", 1e-5}}},
      {"absorb", {{"R_ladder", {8.0, 2.0, 32.0}}}},
      {"ineq", {{"samples", 50}, {"modes", 4}, {"decay", 1.5}}},
      {"out", {{"csv", "a.csv"}, {"json", "a.json"}}}};
}

}  // namespace

TEST_CASE("parse_config reads every section and sorts the ladders") {
  const ScenarioConfig c = parse_config(full_config());
  CHECK(c.scenario == "decay");
  CHECK(c.L == 2.0);
  CHECK(c.Y == 1.5);
  CHECK(c.nx == 63);
  CHECK(c.ny == 31);
  CHECK(c.Pr == 0.8);
  CHECK(c.Ra == 12.0);
  CHECK(c.ic_kind == "random");
  CHECK(c.ic_R == 2.5);
  CHECK(c.ic_seed == 11);
  CHECK(c.ic_y_extent == 0.4);
  CHECK(c.forcing_kind == "bump");
  CHECK(c.forcing_amp == 0.3);
  CHECK(c.dt == 5e-4);
  CHECK(c.t_end == 2.0);
  CHECK(c.sample_every == 4);
  CHECK(c.tail_ks == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(c.tail_eps == 1e-5);
  CHECK(c.absorb_R == std::vector<double>{2.0, 8.0, 32.0});
  CHECK(c.ineq_samples == 50);
  CHECK(c.ineq_modes == 4);
  CHECK(c.ineq_decay == 1.5);
  CHECK(c.out_csv == "a.csv");
  CHECK(c.out_json == "a.json");
}

TEST_CASE("parse_config falls back to documented defaults") {
  const ScenarioConfig c = parse_config(json::object());
  CHECK(c.scenario.empty());
  CHECK(c.L == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(c.nx == 127);
  CHECK(c.Pr == 1.0);
  CHECK(c.Ra == 0.0);
  CHECK(c.ic_kind == "eigenmode");
  CHECK(c.forcing_kind == "none");
  CHECK(c.absorb_R == std::vector<double>{1.0, 4.0, 16.0, 64.0});
  CHECK(c.ineq_samples == 1000);
}

TEST_CASE("parse_config rejects malformed input") {
  auto reject = [](json j) { CHECK_THROWS_AS(parse_config(j), ConfigError); };

  reject(json::array());
  json j = full_config();
  j["surprise"] = 1;
  reject(j);
  j = full_config();
  j["grid"]["extra"] = 1;
  reject(j);
  j = full_config();
  j["scenario"] = "warp";
  reject(j);
  j = full_config();
  j["grid"]["L"] = -2.0;
  reject(j);
  j = full_config();
  j["grid"]["nx"] = 2;
  reject(j);
  j = full_config();
  j["grid"]["ny"] = 10000;
  reject(j);
  j = full_config();
  j["grid"]["nx"] = "wide";
  reject(j);
  j = full_config();
  j["phys"]["Pr"] = 0.0;
  reject(j);
  j = full_config();
  j["ic"]["kind"] = "vortex";
  reject(j);
  j = full_config();
  j["ic"]["seed"] = -3;
  reject(j);
  j = full_config();
  j["forcing"]["kind"] = "taylor";
  reject(j);
  j = full_config();
  j["forcing"]["amp"] = -0.1;
  reject(j);
  j = full_config();
  j["time"]["dt"] = 0.0;
  reject(j);
  j = full_config();
  j["time"]["t_end"] = 1e-7;  // < dt
  reject(j);
  j = full_config();
  j["sample"]["every"] = 0;
  reject(j);
  j = full_config();
  j["tail"]["ks"] = {1.0, 1.0};
  reject(j);
  j = full_config();
  j["tail"]["ks"] = {-1.0};
  reject(j);
  j = full_config();
  j["tail"]["eps"] = 0.0;
  reject(j);
  j = full_config();
  j["absorb"]["R_ladder"] = {4.0};
  reject(j);
  j = full_config();
  j["absorb"]["R_ladder"] = {4.0, 4.0};
  reject(j);
  j = full_config();
  j["ineq"]["samples"] = 0;
  reject(j);
  j = full_config();
  j["ineq"]["modes"] = 65;
  reject(j);
}

TEST_CASE("load_config reports unreadable or unparsable files") {
  CHECK_THROWS_AS(load_config("no_such_config.json"), ConfigError);
  const std::string path = "broken_config.json";
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(load_config(path), ConfigError);
  fs::remove(path);
}

TEST_CASE("config_hash tracks semantics and ignores output paths") {
  const ScenarioConfig a = parse_config(full_config());
  ScenarioConfig b = a;
  CHECK(config_hash(a) == config_hash(b));
  b.out_csv = "elsewhere.csv";
  b.out_json = "";
  CHECK(config_hash(a) == config_hash(b));
  ScenarioConfig c = a;
  c.Ra += 1e-9;
  CHECK(config_hash(a) != config_hash(c));
  ScenarioConfig d = a;
  d.ic_seed += 1;
  CHECK(config_hash(a) != config_hash(d));
  ScenarioConfig e = a;
  e.tail_ks.push_back(9.0);
  CHECK(config_hash(a) != config_hash(e));
}

TEST_CASE("entry_time: the four contract cases") {
  using Series = std::vector<std::pair<double, double>>;
  // Never exceeds: entry at the first sample.
  CHECK(entry_time(Series{{1.0, 0.2}, {2.0, 0.3}}, 1.0) == 1.0);
  // Exceeds then settles: first sample after the last exceedance.
  CHECK(entry_time(Series{{0.0, 5.0}, {1.0, 3.0}, {2.0, 0.5}, {3.0, 0.4}}, 1.0) ==
        2.0);
  // Dips inside and leaves again: only the last exceedance counts.
  CHECK(entry_time(Series{{0.0, 5.0}, {1.0, 0.5}, {2.0, 3.0}, {3.0, 0.1}}, 1.0) ==
        3.0);
  // Still outside at the end: no entry.
  CHECK_FALSE(entry_time(Series{{0.0, 5.0}, {1.0, 2.0}}, 1.0).has_value());
  CHECK_THROWS_AS(entry_time(Series{}, 1.0), std::invalid_argument);
}

TEST_CASE("linear_fit recovers exact lines and flags degeneracy") {
  const std::vector<double> xs{0.0, 1.0, 2.0, 3.0};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(2.0 * x + 1.0);
  const LineFit f = linear_fit(xs, ys);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-14));

  const LineFit flat = linear_fit(xs, {4.0, 4.0, 4.0, 4.0});
  CHECK(flat.slope == 0.0);
  CHECK(flat.r2 == 1.0);

  CHECK_THROWS_AS(linear_fit({1.0, 1.0}, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(linear_fit({1.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(linear_fit({1.0, 2.0}, {0.0}), std::invalid_argument);
}

TEST_CASE("forcing built from the discrete operators freezes a steady state") {
  const GridSpec g = make_grid(std::numbers::pi, 1.2, 47, 39);
  const SolverPlan plan(g);
  Params p;
  p.Pr = 1.4;
  p.Ra = 20.0;

  State star = make_state(g);
  star.xi = random_field(3, g, 4, 2.5);
  star.theta = random_field(4, g, 4, 2.5);
  star.psi = solve_poisson(plan, star.xi);

  // Sources chosen so the semi-discrete right-hand sides vanish identically
  // at this state; the time integrator should then hold it to rounding.
  const ScalarField lap_xi = laplacian(star.xi);
  const ScalarField lap_th = laplacian(star.theta);
  const ScalarField Jxi = jacobian(star.psi, star.xi);
  const ScalarField Jth = jacobian(star.psi, star.theta);
  const ScalarField thx = ddx(star.theta);
  p.f = ScalarField(g);
  p.g = ScalarField(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    p.f.data()[k] = -lap_xi.data()[k] + Jxi.data()[k] +
                    (p.Ra / p.Pr) * thx.data()[k];
    p.g.data()[k] = -lap_th.data()[k] / p.Pr + Jth.data()[k];
  }

  StepperConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.2;  // 200 steps
  StepperMemory mem;
  const State out = integrate(star, p, cfg, mem, plan);
  double drift_xi = 0.0, drift_th = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    drift_xi = std::max(drift_xi, std::fabs(out.xi.data()[k] - star.xi.data()[k]));
    drift_th = std::max(drift_th,
                        std::fabs(out.theta.data()[k] - star.theta.data()[k]));
  }
  const double scale = l2_norm(star.xi);
  CHECK(drift_xi < 1e-9 * scale);
  CHECK(drift_th < 1e-9 * scale);
}

TEST_CASE("decay scenario end to end, with reproducible outputs") {
  ScenarioConfig cfg;
  cfg.scenario = "decay";
  cfg.nx = cfg.ny = 31;
  cfg.ic_kind = "random";
  cfg.ic_seed = 5;
  cfg.dt = 2e-3;
  cfg.t_end = 0.3;
  cfg.sample_every = 5;
  cfg.tail_ks = {0.8};
  cfg.out_csv = "exp_decay_smoke.csv";
  cfg.out_json = "exp_decay_smoke.json";
  fs::remove(cfg.out_csv);
  fs::remove(cfg.out_json);

  const RunResult r = run_scenario(cfg);
  CHECK(r.pass);
  CHECK(r.report.at("pass") == true);
  CHECK(r.report.at("scenario") == "decay");
  CHECK(r.report.at("config_hash") == config_hash(cfg));
  CHECK(r.report.at("eigenmode").at("pass") == true);
  CHECK(r.report.at("envelope").at("pass") == true);
  CHECK(r.report.at("zero").at("pass") == true);
  CHECK(double(r.report.at("eigenmode").at("rate_rel_err")) <= 5e-3);

  REQUIRE(fs::exists(cfg.out_csv));
  REQUIRE(fs::exists(cfg.out_json));
  std::ifstream jf(cfg.out_json);
  const json saved = json::parse(jf);
  CHECK(saved.at("pass") == true);

  // Identical configs produce byte-identical CSVs.
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
  };
  const std::string first = slurp(cfg.out_csv);
  CHECK_FALSE(first.empty());
  const RunResult r2 = run_scenario(cfg);
  CHECK(r2.pass);
  CHECK(slurp(cfg.out_csv) == first);
  CHECK(r2.report == r.report);

  fs::remove(cfg.out_csv);
  fs::remove(cfg.out_json);
}

TEST_CASE("run_scenario rejects an unset or unknown scenario") {
  ScenarioConfig cfg;
  CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
  cfg.scenario = "warp";
  CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
}

TEST_CASE("tail scenario requires a cutoff ladder") {
  ScenarioConfig cfg;
  cfg.scenario = "tail";
  cfg.tail_ks = {};
  CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
}

TEST_CASE("doubling Y moves monitored norms of a compactly forced run by well under 1%") {
  // Y = 6 with ny = 191 and Y = 12 with ny = 383 both give dy = 2Y/(ny+1) =
  // 0.0625, a power of two, so the short channel's y nodes are bitwise equal
  // to a contiguous block of the tall channel's and the initial data and
  // forcing agree nodewise on the overlap. Any disagreement between the runs
  // is the truncation effect of the nearer wall.
  auto run_at = [](double Y, std::size_t ny) {
    const GridSpec grid = make_grid(std::numbers::pi, Y, 47, ny);
    const SolverPlan plan(grid);
    auto bump = [&](int kx, double sigma) {
      ScalarField out(grid);
      for (std::size_t j = 0; j < grid.ny; ++j) {
        const double w = std::exp(-(grid.y(j) / sigma) * (grid.y(j) / sigma));
        for (std::size_t i = 0; i < grid.nx; ++i)
          out(i, j) =
              std::sin(double(kx) * std::numbers::pi * grid.x(i) / grid.L) * w;
      }
      return out;
    };
    Params p;
    p.Pr = 1.0;
    p.Ra = 10.0;
    p.f = bump(2, 0.7);
    p.g = bump(1, 0.7);
    State s = make_state(grid);
    s.xi = bump(1, 0.7);
    s.theta = bump(2, 0.7);
    s.psi = solve_poisson(plan, s.xi);
    StepperConfig scfg;
    scfg.dt = 4e-3;
    scfg.t_end = 6.0;
    StepperMemory mem;
    DiagCollector collect(&p, {});
    const Observer obs{250, [&](long n, const State& cur) { collect(n, cur); }};
    integrate(std::move(s), p, scfg, mem, plan, {&obs, 1});
    collect.finish();
    return collect.records();
  };
  const auto narrow = run_at(6.0, 191);
  const auto tall = run_at(12.0, 383);
  REQUIRE(narrow.size() == tall.size());
  REQUIRE(narrow.size() >= 7);
  // The comparison must not be between noise floors.
  CHECK(narrow.back().l2_theta > 0.05);
  CHECK(narrow.back().l2_xi > 0.05);
  auto rel = [](double a, double b) {
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
  };
  double worst = 0.0;
  for (std::size_t r = 1; r < narrow.size(); ++r) {
    worst = std::max(worst, rel(narrow[r].l2_xi, tall[r].l2_xi));
    worst = std::max(worst, rel(narrow[r].l2_theta, tall[r].l2_theta));
    worst = std::max(worst, rel(narrow[r].h1_xi, tall[r].h1_xi));
    worst = std::max(worst, rel(narrow[r].h1_theta, tall[r].h1_theta));
    worst = std::max(worst, rel(narrow[r].lap_xi, tall[r].lap_xi));
    worst = std::max(worst, rel(narrow[r].lap_theta, tall[r].lap_theta));
  }
  CHECK(worst < 0.01);
}
