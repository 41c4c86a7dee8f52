#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tvcsim/config.hpp"

namespace tvcsim {

// One controller-rate sample. Column order of the flight CSV.
struct FlightLogRow {
  double t;
  double x, xdot, z, zdot, theta, q;
  double thrust_n, gimbal_rad;
  double x_d, z_d, theta_d;
  double e_x, e_z, e_theta;
  double fax_true, fax_hat;
  double tau_true, tau_hat;
  double faz_true, faz_hat;
  double delta; // lateral-channel linearization mismatch diagnostic
  double alpha_rad, mach, qbar_pa;
};

struct FlightLog {
  std::vector<FlightLogRow> rows;
};

struct RunMetrics {
  bool stable = true;
  std::string failure; // empty when stable

  double end_time_s = 0.0;
  double end_altitude_m = 0.0;
  double end_vspeed_mps = 0.0;
  double end_downrange_m = 0.0;

  // Tracking and actuation statistics over the powered phase.
  double rmse_x_m = 0.0;
  double rmse_z_m = 0.0;
  double rmse_theta_rad = 0.0;
  double rms_thrust_n = 0.0;
  double rms_gimbal_rad = 0.0;

  // Estimator error: RMSE of (estimate - truth), and as % of the true RMS.
  double est_rmse_fax_n = 0.0, est_pct_fax = 0.0;
  double est_rmse_tau_nm = 0.0, est_pct_tau = 0.0;
  double est_rmse_faz_n = 0.0, est_pct_faz = 0.0;

  double max_qbar_pa = 0.0;
  double max_abs_alpha_rad = 0.0;
  double max_abs_gimbal_rad = 0.0;
  int ticks = 0;
};

// Per-run dispersion multipliers (unit mean). m/j/xcm scale the nominal
// mass-property trajectories inside the plant; xcp/cd/cl scale table lookups.
struct ParamScales {
  double m = 1.0, j = 1.0, xcm = 1.0, xcp = 1.0, cd = 1.0, cl = 1.0;
};

struct FlightResult {
  FlightLog log;
  RunMetrics metrics;
};

// Closed-loop flight from ignition to propellant exhaustion or t_max.
// Physics at cfg.dt (RK4), controller zero-order-held at cfg.control_rate_hz.
// Instability (pitch envelope, non-finite state, |e_z| > 10 km, control
// singularities) is recorded in the metrics, not thrown.
FlightResult run_flight(const SimConfig& cfg, const ParamScales& scales = {},
                        bool keep_log = true,
                        std::optional<std::uint64_t> gust_seed_override = std::nullopt);

// Error/actuation statistics from a log (outcome fields untouched).
RunMetrics compute_metrics(const FlightLog& log);

struct McRunRecord {
  int index;
  ParamScales scales;
  RunMetrics metrics;
};

struct McStat {
  double mean = 0.0, stdev = 0.0, min = 0.0, max = 0.0;
};

struct McSummary {
  int runs = 0;
  int stable_runs = 0;
  std::vector<int> unstable_indices;
  McStat rmse_x, rmse_z, rmse_theta_deg, rms_thrust, rms_gimbal_deg, end_altitude, end_vspeed;
};

struct McResult {
  std::vector<McRunRecord> records;
  McSummary summary;
};

// Dispersed campaign: per-run parameter multipliers from the campaign seed,
// fresh gust seed per run, runs farmed to a thread pool, results merged in
// run-index order so the output is independent of scheduling.
McResult run_monte_carlo(const SimConfig& cfg);

void write_flight_csv(std::ostream& os, const FlightLog& log);
std::string flight_csv(const FlightLog& log);

void write_mc_csv(std::ostream& os, const McResult& mc);
std::string mc_table(const McResult& mc);
std::string metrics_report(const RunMetrics& m);

} // namespace tvcsim
