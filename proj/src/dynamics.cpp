#include "tvcsim/dynamics.hpp"

#include <cmath>

namespace tvcsim {

Eigen::Matrix2d rotation_matrix(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix2d r;
  r << c, s, -s, c;
  return r;
}

ForcesMoments aero_forces(const RigidBodyState& state, const EnvSample& env,
                          const AeroTables& tables, const MassState& ms, double ref_area_m2,
                          double diameter_m, const AeroScales& scales) {
  ForcesMoments fm;

  const Eigen::Matrix2d r = rotation_matrix(state.theta);
  const Eigen::Vector2d v_i{state.xdot, state.zdot};
  const Eigen::Vector2d v_rel_b = r.transpose() * (v_i - env.wind_i);
  const double speed = v_rel_b.norm();
  if (speed == 0.0 || env.density_kgpm3 <= 0.0)
    return fm;

  fm.alpha_rad = std::atan2(v_rel_b[1], v_rel_b[0]);
  fm.mach = speed / env.speed_of_sound_mps;
  fm.qbar_pa = 0.5 * env.density_kgpm3 * speed * speed;

  AeroCoeffs c = aero_coefficients(fm.alpha_rad, fm.mach, tables);
  c.c_l *= scales.c_l;
  c.c_d *= scales.c_d;
  c.x_cp_m *= scales.x_cp;

  const double ca = c.c_d * std::cos(fm.alpha_rad) - c.c_l * std::sin(fm.alpha_rad);
  const double cn = c.c_l * std::cos(fm.alpha_rad) + c.c_d * std::sin(fm.alpha_rad);

  fm.f_a_b = {-fm.qbar_pa * ca * ref_area_m2, -fm.qbar_pa * cn * ref_area_m2};
  fm.f_a_i = r * fm.f_a_b;
  fm.sm = (c.x_cp_m - ms.x_cm) / diameter_m;
  fm.tau_a = fm.f_a_b[1] * fm.sm * diameter_m;
  return fm;
}

StateDeriv eom_derivative(const RigidBodyState& state, const MassState& ms,
                          const ControlCommand& cmd, const ForcesMoments& fm, double g) {
  const double c = std::cos(state.theta), s = std::sin(state.theta);
  StateDeriv d;
  d.xdot = state.xdot;
  d.zdot = state.zdot;
  d.thetadot = state.q;
  d.xddot = -g + fm.f_a_i[0] / ms.m + (c * cmd.u1 + s * cmd.u2) / ms.m;
  d.zddot = fm.f_a_i[1] / ms.m + (-s * cmd.u1 + c * cmd.u2) / ms.m;
  d.qdot = (fm.tau_a + ms.l * cmd.u2) / ms.j_y;
  return d;
}

} // namespace tvcsim
