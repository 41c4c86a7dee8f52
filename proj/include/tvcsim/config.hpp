#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tvcsim/aero.hpp"
#include "tvcsim/dynamics.hpp"
#include "tvcsim/inner_control.hpp"
#include "tvcsim/mission.hpp"
#include "tvcsim/outer_control.hpp"
#include "tvcsim/vehicle.hpp"
#include "tvcsim/wind.hpp"

namespace tvcsim {

// Configuration problems abort with exit code 2; messages carry file/line
// anchors where one exists.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct McSpec {
  int runs = 100;
  std::uint64_t seed = 2025;
  // 3-sigma values of the unit-mean Gaussian multipliers, clamped at 3 sigma.
  double sigma3_mass = 0.05;
  double sigma3_inertia = 0.10;
  double sigma3_xcm = 0.10;
  double sigma3_xcp = 0.20;
  double sigma3_cd = 0.20;
  double sigma3_cl = 0.20;
};

// Fully resolved run description: parsed files, defaults and overrides all
// applied. Everything a flight needs, nothing read from disk afterwards.
struct SimConfig {
  VehicleModel vehicle;

  AeroTables aero;
  bool aero_enabled = true;
  std::string aero_source = "builtin"; // "builtin" or a CSV path

  std::vector<WindProfilePoint> wind_profile;
  std::string wind_source = "builtin";
  GustParams gust;

  InnerGains inner;
  ActuatorLimits actuator;

  Eigen::Vector3d lqr_q{5.0, 1.0, 1.0};
  double lqr_r = 60.0;
  double thetadot_cutoff_hz = 1.0;
  double thetaddot_cutoff_hz = 0.5;
  double estimate_cutoff_hz = 0.2;
  double sm_min = 1e-3;

  std::string scenario = "vertical"; // vertical | dogleg | custom
  AccelProfile profile;

  double dt = 1e-3;              // physics step [s]
  double control_rate_hz = 500.0; // controller rate; period must be a multiple of dt
  double t_max = 200.0;          // safety stop [s]
  bool freeze_mass = false;      // pin mass properties at liftoff (test support)

  McSpec mc;

  int steps_per_control_cycle() const;
};

// Raw "[section] key = value" content with line anchors for diagnostics.
struct RawConfig {
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, std::map<std::string, Entry>> sections;
};

RawConfig parse_ini(const std::string& text, const std::string& origin);

// Applies one "section.key=value" override string.
void apply_override(RawConfig& raw, const std::string& assignment);

// Defaults + raw entries -> validated SimConfig. Rejects unknown sections
// and keys. Loads aero/wind CSVs when configured.
SimConfig build_config(const RawConfig& raw);

inline SimConfig default_config() { return build_config(RawConfig{}); }

// Resolved-config dump in the same INI dialect; records table sources and
// custom profile segments so a run can be reproduced from it.
std::string manifest(const SimConfig& cfg);

} // namespace tvcsim
