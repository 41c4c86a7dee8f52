#pragma once

#include <optional>
#include <stdexcept>

#include <Eigen/Core>

#include "tvcsim/dynamics.hpp"
#include "tvcsim/vehicle.hpp"

namespace tvcsim {

// Raised when the control law cannot produce a usable command (pitch at the
// linearization singularity, non-positive axial thrust, unreachable pitch
// reference). The harness aborts the run and records the reason.
class ControlSingularity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InnerGains {
  double k1x = 2.5;
  double k2x = 4.5;
  double k1t = 12.0;
  double k2t = 10.0;
  double gamma_x = 5.0;  // adaptation rate, vertical force channel
  double gamma_t = 5.0;  // adaptation rate, pitch moment channel
  double singularity_margin_rad = 5.0 * 0.017453292519943295;
};

// Hard actuator envelope, applied after extraction when enabled.
struct ActuatorLimits {
  bool enabled = false;
  double thrust_min_n = 0.0;
  double thrust_max_n = 1e9;
  double gimbal_max_rad = 0.5;
  double thrust_rate_nps = 1e12;   // |dT/dt| bound [N/s]
  double gimbal_rate_radps = 1e6;  // |dmu/dt| bound [rad/s]
};

// Disturbance estimates the adaptation maintains.
struct AdaptiveState {
  double fax_hat_n = 0.0;   // inertial vertical aero force estimate [N]
  double tau_hat_nm = 0.0;  // aero pitch moment estimate [N m]
};

struct InnerReference {
  double x_d, xdot_d, xddot_d;          // altitude reference
  double theta_d, thetadot_d, thetaddot_d; // pitch reference
};

struct TrackingErrors {
  double e_x, edot_x; // altitude error and rate
  double e_t, edot_t; // pitch error and rate
};

// Stabilizing virtual accelerations, per axis:
//   v = -(1 + k1 k2) e - (k1 + k2) edot
Eigen::Vector2d inner_virtual_input(const TrackingErrors& err, const InnerGains& g);

// Euler update of the disturbance estimates at the controller period.
AdaptiveState adapt_update(const AdaptiveState& ad, const TrackingErrors& err, double m,
                           double j_y, const InnerGains& g, double dt);

// Inverts the input map: u = Lambda^{-1} (v - b) with
//   Lambda = [cos(theta)/m  sin(theta)/m; 0  l/j_y]
//   b = (-g + fax_hat/m - xddot_d,  tau_hat/j_y - thetaddot_d)
// Throws ControlSingularity when |theta| >= pi/2 - margin.
Eigen::Vector2d inner_feedback_linearize(const Eigen::Vector2d& v_in, double theta,
                                         const MassState& ms, const AdaptiveState& ad, double g,
                                         double xddot_d, double thetaddot_d,
                                         double singularity_margin_rad);

// Thrust magnitude and gimbal angle realizing the body-frame vector:
// mu = atan2(u2, u1), T = u1/cos(mu). Throws ControlSingularity if u1 <= 0.
std::pair<double, double> extract_thrust_gimbal(const Eigen::Vector2d& u);

struct InnerResult {
  ControlCommand cmd;
  AdaptiveState ad;
  TrackingErrors err;
  Eigen::Vector2d v_in;
};

// One controller cycle: error formation, virtual input, inversion with the
// incoming estimates, actuator extraction (and optional envelope), then the
// adaptation update for the next cycle.
InnerResult inner_step(const RigidBodyState& state, const MassState& ms, const AdaptiveState& ad,
                       const InnerReference& ref, const InnerGains& g, double gravity_now,
                       double dt, const ActuatorLimits& limits = {},
                       const std::optional<ControlCommand>& prev_cmd = std::nullopt);

} // namespace tvcsim
