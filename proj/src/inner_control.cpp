#include "tvcsim/inner_control.hpp"

#include <algorithm>
#include <cmath>

namespace tvcsim {

Eigen::Vector2d inner_virtual_input(const TrackingErrors& err, const InnerGains& g) {
  return {-(1.0 + g.k1x * g.k2x) * err.e_x - (g.k1x + g.k2x) * err.edot_x,
          -(1.0 + g.k1t * g.k2t) * err.e_t - (g.k1t + g.k2t) * err.edot_t};
}

AdaptiveState adapt_update(const AdaptiveState& ad, const TrackingErrors& err, double m,
                           double j_y, const InnerGains& g, double dt) {
  return {ad.fax_hat_n + g.gamma_x * m * (g.k1x * err.e_x + err.edot_x) * dt,
          ad.tau_hat_nm + g.gamma_t * j_y * (g.k1t * err.e_t + err.edot_t) * dt};
}

Eigen::Vector2d inner_feedback_linearize(const Eigen::Vector2d& v_in, double theta,
                                         const MassState& ms, const AdaptiveState& ad, double g,
                                         double xddot_d, double thetaddot_d,
                                         double singularity_margin_rad) {
  constexpr double kHalfPi = 1.5707963267948966;
  if (std::abs(theta) >= kHalfPi - singularity_margin_rad)
    throw ControlSingularity("pitch within singularity margin of +/-90 deg");

  const double b1 = -g + ad.fax_hat_n / ms.m - xddot_d;
  const double b2 = ad.tau_hat_nm / ms.j_y - thetaddot_d;

  const double u2 = (v_in[1] - b2) * ms.j_y / ms.l;
  const double u1 = (ms.m * (v_in[0] - b1) - std::sin(theta) * u2) / std::cos(theta);
  return {u1, u2};
}

std::pair<double, double> extract_thrust_gimbal(const Eigen::Vector2d& u) {
  if (u[0] <= 0.0)
    throw ControlSingularity("commanded axial thrust component is non-positive");
  const double mu = std::atan2(u[1], u[0]);
  return {u[0] / std::cos(mu), mu};
}

namespace {

ControlCommand apply_limits(double thrust, double mu, const ActuatorLimits& lim,
                            const std::optional<ControlCommand>& prev, double dt) {
  if (lim.enabled) {
    thrust = std::clamp(thrust, lim.thrust_min_n, lim.thrust_max_n);
    mu = std::clamp(mu, -lim.gimbal_max_rad, lim.gimbal_max_rad);
    if (prev) {
      const double dT = lim.thrust_rate_nps * dt;
      const double dmu = lim.gimbal_rate_radps * dt;
      thrust = std::clamp(thrust, prev->thrust_n - dT, prev->thrust_n + dT);
      mu = std::clamp(mu, prev->gimbal_rad - dmu, prev->gimbal_rad + dmu);
    }
  }
  return {thrust * std::cos(mu), thrust * std::sin(mu), thrust, mu};
}

} // namespace

InnerResult inner_step(const RigidBodyState& state, const MassState& ms, const AdaptiveState& ad,
                       const InnerReference& ref, const InnerGains& g, double gravity_now,
                       double dt, const ActuatorLimits& limits,
                       const std::optional<ControlCommand>& prev_cmd) {
  InnerResult r;
  r.err = {state.x - ref.x_d, state.xdot - ref.xdot_d, state.theta - ref.theta_d,
           state.q - ref.thetadot_d};
  r.v_in = inner_virtual_input(r.err, g);

  const Eigen::Vector2d u = inner_feedback_linearize(
      r.v_in, state.theta, ms, ad, gravity_now, ref.xddot_d, ref.thetaddot_d,
      g.singularity_margin_rad);
  const auto [thrust, mu] = extract_thrust_gimbal(u);
  r.cmd = apply_limits(thrust, mu, limits, prev_cmd, dt);

  r.ad = adapt_update(ad, r.err, ms.m, ms.j_y, g, dt);
  return r;
}

} // namespace tvcsim
