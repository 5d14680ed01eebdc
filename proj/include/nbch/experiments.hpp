#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nbch/params.hpp"
#include "nbch/state.hpp"

namespace nbch {

/// Raised for malformed or inconsistent scenario configs; the CLI maps it to
/// exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One scenario description, parsed from the JSON config. Documented keys:
///   grid.L grid.Y grid.nx grid.ny
///   phys.Pr phys.Ra
///   ic.kind (eigenmode | gaussian-bump | random), ic.R, ic.seed, ic.y_extent
///   forcing.kind (none | bump), forcing.amp, forcing.y_extent
///   time.dt time.t_end
///   sample.every
///   tail.ks tail.eps
///   absorb.R_ladder
///   ineq.samples ineq.modes ineq.decay
///   out.csv out.json
struct ScenarioConfig {
  std::string scenario;  // decay|absorb|tail|regularity|convergence|inequalities

  double L = 3.141592653589793;
  double Y = 1.5707963267948966;
  std::size_t nx = 127, ny = 127;

  double Pr = 1.0;
  double Ra = 0.0;

  std::string ic_kind = "eigenmode";
  double ic_R = 1.0;  // target L2 norm of the initial fields, > 0
  std::uint64_t ic_seed = 1;
  double ic_y_extent = 0.5;

  std::string forcing_kind = "none";
  double forcing_amp = 0.0;
  double forcing_y_extent = 1.0;

  double dt = 1e-3;
  double t_end = 1.0;
  long sample_every = 10;

  std::vector<double> tail_ks;
  double tail_eps = 1e-4;

  std::vector<double> absorb_R = {1.0, 4.0, 16.0, 64.0};

  std::size_t ineq_samples = 1000;
  std::size_t ineq_modes = 8;
  double ineq_decay = 2.0;

  std::string out_csv;
  std::string out_json;
};

/// Parses and validates; unknown scenarios, bad kinds, or non-finite numbers
/// raise ConfigError.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);

/// FNV-1a of the canonical config serialization; stamped into every report
/// so results are auditable.
std::uint64_t config_hash(const ScenarioConfig& cfg);

struct RunResult {
  bool pass = false;
  nlohmann::json report;
};

/// Unforced runs: (a) principal-eigenmode vorticity decays at mu1_h within
/// 0.5% (fitted rate), (b) any temperature field obeys
/// ||theta(t)||^2 <= ||theta0||^2 exp(-2 mu1_h t / Pr) (1 + 1e-6) at every
/// sample, (c) zero data stays exactly zero.
RunResult run_decay(const ScenarioConfig& cfg);

/// Forced ensemble over the R ladder (plus one repeated-R seed variant):
/// common absorbing ball, no re-exit, entry time ~ a ln R + b with R^2 >=
/// 0.95, post-entry windowed gradient/laplacian integrals stable.
RunResult run_absorb(const ScenarioConfig& cfg);

/// Compactly forced wide channel: finds the smallest ladder k0 with
/// tail_mass <= eps for all k >= k0 from some sample time t3 on; k0 must sit
/// below Y/sqrt(2) and must not move when t_end doubles.
RunResult run_tail(const ScenarioConfig& cfg);

/// Forced run past its transient: suprema and trend slopes of the H2 and
/// time-derivative monitors; slopes must be <= 1e-3 * series mean.
RunResult run_regularity(const ScenarioConfig& cfg);

/// Manufactured-solution refinement ladders; spatial and temporal orders
/// must fit slopes >= 1.8.
RunResult run_convergence(const ScenarioConfig& cfg);

/// Full inequality sweep at the configured sample count, both at the config
/// resolution and at half resolution for the stability checks.
RunResult run_inequalities(const ScenarioConfig& cfg);

RunResult run_scenario(const ScenarioConfig& cfg);

/// First sample time after the last exceedance of `threshold`; t of the
/// first sample when the series never exceeds it; nullopt when the series
/// still exceeds the threshold at its end.
std::optional<double> entry_time(
    const std::vector<std::pair<double, double>>& series, double threshold);

/// Least-squares line fit; r2 is 1 for a perfect fit.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace nbch
