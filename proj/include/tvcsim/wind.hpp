#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace tvcsim {

struct WindProfilePoint {
  double altitude_m;  // [m]
  double wind_z_mps;  // horizontal (downrange) mean wind [m/s]
};

struct GustParams {
  bool enabled = false;
  double sigma_mps = 1.0;        // stationary gust intensity [m/s]
  double length_m = 200.0;       // turbulence length scale [m]
  double ref_speed_mps = 170.0;  // airspeed used for the filter time constant [m/s]
  std::uint64_t seed = 42;
};

// Tabulated mean-wind profile, roughly 0-20 m/s below 20 km, calm above.
std::vector<WindProfilePoint> default_wind_profile();

// Loads "altitude_m, wind_z_mps" CSV rows (header optional, altitudes ascending).
std::vector<WindProfilePoint> load_wind_profile_csv(const std::string& path);

// Mean wind profile plus one first-order gust shaping filter per inertial
// axis. The filter advances once per simulation step (advance()); sampling
// is a pure read so integrator stage queries stay deterministic.
class WindModel {
 public:
  WindModel(std::vector<WindProfilePoint> profile, const GustParams& gust, double dt);

  // One filter step: x' = a x + b n, a = exp(-dt/tau), b = sigma sqrt(1-a^2),
  // tau = L_g / V_ref. Draw order is fixed (vertical axis, then downrange).
  void advance();

  // Inertial wind (vertical, downrange) at altitude: mean profile + current gust.
  Eigen::Vector2d sample(double altitude_m) const;

  // Mean profile only; this is the controller's wind knowledge.
  double mean_wind_z(double altitude_m) const;

 private:
  std::vector<WindProfilePoint> profile_;
  GustParams gust_;
  double a_ = 0.0, b_ = 0.0;
  Eigen::Vector2d gust_state_{0.0, 0.0};
  std::mt19937_64 rng_;
};

} // namespace tvcsim
