#pragma once

#include <Eigen/Core>

#include "tvcsim/aero.hpp"
#include "tvcsim/vehicle.hpp"

namespace tvcsim {

// Pitch-plane state. x is altitude (inertial up), z downrange, theta the
// pitch angle of the body axis from vertical (positive tilts the nose
// toward -z), q the pitch rate.
struct RigidBodyState {
  double x = 0.0;     // [m]
  double xdot = 0.0;  // [m/s]
  double z = 0.0;     // [m]
  double zdot = 0.0;  // [m/s]
  double theta = 0.0; // [rad]
  double q = 0.0;     // [rad/s]
};

// Body-frame thrust vector components: u1 along the body axis, u2 lateral.
// thrust_n and gimbal_rad are the physical actuator values they encode.
struct ControlCommand {
  double u1 = 0.0;        // [N]
  double u2 = 0.0;        // [N]
  double thrust_n = 0.0;  // [N]
  double gimbal_rad = 0.0; // [rad]
};

// Environment at one point: atmosphere plus inertial wind (vertical, downrange).
struct EnvSample {
  double pressure_pa = 0.0;
  double density_kgpm3 = 0.0;
  double speed_of_sound_mps = 0.0;
  double g = 0.0;
  Eigen::Vector2d wind_i{0.0, 0.0};
};

// Aerodynamic forces and the flow quantities they came from.
struct ForcesMoments {
  Eigen::Vector2d f_a_b{0.0, 0.0}; // body frame (axial, normal) [N]
  Eigen::Vector2d f_a_i{0.0, 0.0}; // inertial frame (vertical, downrange) [N]
  double tau_a = 0.0;              // aero pitch moment about the CM [N m]
  double alpha_rad = 0.0;
  double mach = 0.0;
  double qbar_pa = 0.0;            // dynamic pressure [Pa]
  double sm = 0.0;                 // static margin (x_cp - x_cm)/diameter
};

struct StateDeriv {
  double xdot, xddot, zdot, zddot, thetadot, qdot;
};

// Dispersion multipliers applied inside the plant (1.0 = nominal).
struct AeroScales {
  double c_l = 1.0;
  double c_d = 1.0;
  double x_cp = 1.0;
};

// Body-to-inertial rotation: [cos sin; -sin cos].
Eigen::Matrix2d rotation_matrix(double theta);

// Aerodynamic force/moment from the relative-wind state. Angle of attack
// and dynamic pressure come from the body-frame relative velocity; the
// moment arm is (x_cp - x_cm). Zero airspeed gives identically zero forces.
ForcesMoments aero_forces(const RigidBodyState& state, const EnvSample& env,
                          const AeroTables& tables, const MassState& ms, double ref_area_m2,
                          double diameter_m, const AeroScales& scales = {});

// Equations of motion with precomputed aero forces; affine in (u1, u2).
StateDeriv eom_derivative(const RigidBodyState& state, const MassState& ms,
                          const ControlCommand& cmd, const ForcesMoments& fm, double g);

// Everything the plant needs to evaluate derivatives.
struct Plant {
  VehicleModel vehicle;
  AeroTables tables;
  AeroScales scales;
  bool aero_enabled = true;

  ForcesMoments forces(const RigidBodyState& state, const MassState& ms,
                       const EnvSample& env) const {
    if (!aero_enabled)
      return {};
    return aero_forces(state, env, tables, ms, vehicle.ref_area_m2, vehicle.diameter_m, scales);
  }

  StateDeriv derivative(const RigidBodyState& state, const MassState& ms,
                        const ControlCommand& cmd, const EnvSample& env) const {
    return eom_derivative(state, ms, cmd, forces(state, ms, env), env.g);
  }
};

// Classic RK4 step of the rigid-body state with mass properties and command
// held over the step. env(altitude, t) supplies atmosphere/gravity/wind at
// each stage point.
template <typename EnvFn>
RigidBodyState step_rk4(const RigidBodyState& s0, const MassState& ms, const ControlCommand& cmd,
                        const Plant& plant, EnvFn&& env, double t, double dt) {
  auto plus = [](const RigidBodyState& s, const StateDeriv& d, double h) {
    return RigidBodyState{s.x + h * d.xdot,     s.xdot + h * d.xddot, s.z + h * d.zdot,
                          s.zdot + h * d.zddot, s.theta + h * d.thetadot, s.q + h * d.qdot};
  };
  auto f = [&](const RigidBodyState& s, double tt) {
    return plant.derivative(s, ms, cmd, env(s.x, tt));
  };

  const StateDeriv k1 = f(s0, t);
  const StateDeriv k2 = f(plus(s0, k1, 0.5 * dt), t + 0.5 * dt);
  const StateDeriv k3 = f(plus(s0, k2, 0.5 * dt), t + 0.5 * dt);
  const StateDeriv k4 = f(plus(s0, k3, dt), t + dt);

  RigidBodyState s1 = s0;
  s1.x += dt / 6.0 * (k1.xdot + 2.0 * k2.xdot + 2.0 * k3.xdot + k4.xdot);
  s1.xdot += dt / 6.0 * (k1.xddot + 2.0 * k2.xddot + 2.0 * k3.xddot + k4.xddot);
  s1.z += dt / 6.0 * (k1.zdot + 2.0 * k2.zdot + 2.0 * k3.zdot + k4.zdot);
  s1.zdot += dt / 6.0 * (k1.zddot + 2.0 * k2.zddot + 2.0 * k3.zddot + k4.zddot);
  s1.theta += dt / 6.0 * (k1.thetadot + 2.0 * k2.thetadot + 2.0 * k3.thetadot + k4.thetadot);
  s1.q += dt / 6.0 * (k1.qdot + 2.0 * k2.qdot + 2.0 * k3.qdot + k4.qdot);
  return s1;
}

} // namespace tvcsim
