#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nbch/params.hpp"
#include "nbch/state.hpp"

namespace nbch {

/// Smooth 0/1 bridge: 0 for |s| <= 1, 1 for |s| >= 2, quintic smoothstep in
/// between (with tau = |s|-1, phi = 6 tau^5 - 15 tau^4 + 10 tau^3), C^2 at
/// the plateau joints, phi(1.5) = 0.5.
double cutoff_phi(double s);

/// Tail radius plus the bridge profile above. Kept as a type so reports can
/// name the cutoff they used.
struct CutoffSpec {
  double k = 1.0;  // > 0
  static constexpr const char* profile = "quintic-smoothstep[1,2]";
};

/// Solution mass outside the strip |y| < k, weighted by the squared cutoff:
/// sum phi^2(y^2/k^2) (xi^2 + theta^2) dx dy. Zero when the state is
/// supported in |y| < k, and in particular whenever k >= Y; non-increasing
/// in k for a fixed state.
double tail_mass(const State& state, double k);

/// One sampled row of every monitored functional. Optional entries are
/// absent when no previous sample exists (first record of a run).
/// The work terms and rhs-based derivative norms are report extras; the CSV
/// schema is exactly the columns listed at csv_header().
struct DiagRecord {
  double t = 0.0;
  double l2_xi = 0.0;
  double l2_theta = 0.0;
  double h1_xi = 0.0;      // ||grad xi||
  double h1_theta = 0.0;   // ||grad theta||
  double lap_xi = 0.0;     // ||lap xi||
  double lap_theta = 0.0;  // ||lap theta||
  std::vector<std::pair<double, double>> tail;  // (k, mass), ascending k

  std::optional<double> dxi_dt;     // ||xi^n - xi^(n-1)|| / dt
  std::optional<double> dtheta_dt;  // ||theta^n - theta^(n-1)|| / dt
  std::optional<double> energy_residual_theta;
  std::optional<double> energy_residual_xi;

  // Extras (not in the CSV): time-derivative norms evaluated from the
  // equations' right-hand sides, and the instantaneous work terms entering
  // the energy balances.
  std::optional<double> dxi_dt_rhs;
  std::optional<double> dtheta_dt_rhs;
  double work_g = 0.0;     // (g, theta)
  double work_f = 0.0;     // (f, xi)
  double work_buoy = 0.0;  // (Ra/Pr) (ddx theta, xi)
};

/// Fills a record at state.t. With a previous sampled state the backward
/// time-derivative norms are included, and the energy-balance residuals
///   |1/2 dE_theta/dt + (1/Pr)||grad theta||^2 - (g, theta)|
///   |1/2 dE_xi/dt + ||grad xi||^2 + (Ra/Pr)(ddx theta, xi) - (f, xi)|
/// use the backward difference of E = ||.||^2; DiagCollector replaces them
/// with centered differences once the following sample arrives.
DiagRecord sample(const State& state, const State* prev, const Params& params,
                  const std::vector<double>& ks);

/// Trapezoid integral of a sampled series over [t0, t0+width], interpolating
/// the window endpoints. Throws std::invalid_argument when the series does
/// not cover the window.
double windowed_integral(const std::vector<std::pair<double, double>>& series,
                         double t0, double width = 1.0);

/// Observer-side sampler. Keeps the previous sampled state for difference
/// quotients and holds each record back one sample so its energy residuals
/// can use the centered difference (first record: no residual; last record,
/// flushed by finish(): one-sided). Streams rows to CSV when a path is set.
class DiagCollector {
 public:
  DiagCollector(const Params* params, std::vector<double> ks,
                std::string csv_path = "");

  void operator()(long step, const State& s);
  void finish();

  const std::vector<DiagRecord>& records() const { return records_; }

  /// (t, value) view of one record field, for fits and window integrals.
  static std::vector<std::pair<double, double>> series(
      const std::vector<DiagRecord>& recs, double DiagRecord::*field);
  /// Same for optional fields; records without a value are skipped.
  static std::vector<std::pair<double, double>> series(
      const std::vector<DiagRecord>& recs,
      std::optional<double> DiagRecord::*field);

 private:
  void flush(DiagRecord&& r);

  const Params* params_;
  std::vector<double> ks_;
  std::string csv_path_;
  std::vector<DiagRecord> records_;
  std::optional<State> prev_;
  std::optional<DiagRecord> pending_;
  // E = squared L2 norms at the record flushed before pending_, for the
  // centered derivative at pending_'s time.
  double t_before_ = 0.0, Eth_before_ = 0.0, Exi_before_ = 0.0;
  bool have_before_ = false;
};

/// Fixed CSV schema: t, l2_xi, l2_theta, h1_xi, h1_theta, lap_xi, lap_theta,
/// dxi_dt, dtheta_dt, energy_residual_theta, energy_residual_xi, then one
/// tail_k=<k> column per cutoff radius in ascending order. Absent optionals
/// serialize as "nan". All numbers use 17 significant digits.
std::string csv_header(const std::vector<double>& ks);
std::string csv_row(const DiagRecord& r);

}  // namespace nbch
