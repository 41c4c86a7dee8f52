#pragma once

#include <Eigen/Core>

#include "tvcsim/dynamics.hpp"
#include "tvcsim/inner_control.hpp"
#include "tvcsim/vehicle.hpp"

namespace tvcsim {

struct OuterGains {
  double k_z;    // downrange position gain
  double k_zdot; // downrange rate gain
  double k_i;    // integral gain
};

// Continuous-time LQR for the downrange error plant
//   d/dt (e_z, edot_z, zeta) = A e + B v,  A = [0 1 0; 0 0 0; 1 0 0], B = [0;1;0]
// solved by Kleinman-Newton iteration on the Riccati equation.
// K = R^{-1} B' P is returned with positive entries (k_z, k_zdot, k_i).
OuterGains lqr_design(const Eigen::Vector3d& q_diag, double r);

// One-pole low-pass with exact unit DC gain: y += dt/(tau+dt) (u - y).
class LowPass {
 public:
  LowPass() = default;
  LowPass(double cutoff_hz, double dt);
  double step(double u);
  double value() const { return y_; }

 private:
  double alpha_ = 1.0;
  double y_ = 0.0;
};

// Lateral aero force reconstructed from the vertical-force and moment
// estimates through the center-of-pressure geometry:
//   f_az = cos(theta) f_n - tan(theta) (fax - sin(theta) f_n),  f_n = tau/(SM dbar)
double indirect_faz_estimate(double theta, double fax_hat, double tau_hat, double sm,
                             double dbar);

// PI-D state feedback on the downrange error: v = -k_z e - k_zdot edot - k_i zeta.
double outer_virtual_input(double e_z, double edot_z, double zeta, const OuterGains& g);

struct PitchExtraction {
  double theta_d;  // [rad]
  bool clamped;    // arccos argument was clamped into [-1, 1]
};

// Solves a_hat tan(theta) + b_hat / cos(theta) = u_out for the pitch
// reference, picking the minimum-|theta| branch inside +/-90 deg. Throws
// ControlSingularity when no branch clears the singularity margin.
PitchExtraction extract_pitch_reference(double a_hat, double b_hat, double u_out,
                                        double singularity_margin_rad);

struct OuterConfig {
  OuterGains gains{0.61, 1.11, 0.13};
  double thetadot_cutoff_hz = 1.0;
  double thetaddot_cutoff_hz = 0.5;
  // Bandwidth of the inner-loop estimates as seen by the pitch extraction.
  // The extraction feeds back into the estimates through e_theta, so the
  // outer loop must see them slower than the inner loop settles.
  double estimate_cutoff_hz = 0.2;
  double sm_min = 1e-3;                // |SM| floor for the indirect estimate
  double singularity_margin_rad = 5.0 * 0.017453292519943295;
};

// Persistent outer-loop state across controller cycles.
struct OuterState {
  double zeta = 0.0;          // integral of e_z
  double last_faz_hat = 0.0;  // held when |SM| < sm_min
  double prev_theta_d = 0.0;
  double prev_thetadot_f = 0.0;
  bool primed = false;
  LowPass lp_rate;    // thetadot_d path
  LowPass lp_acc1;    // thetaddot_d path, two cascaded stages
  LowPass lp_acc2;
  LowPass lp_faz;     // estimate paths into the extraction
  LowPass lp_tau;

  OuterState() = default;
  OuterState(const OuterConfig& cfg, double dt)
      : lp_rate(cfg.thetadot_cutoff_hz, dt),
        lp_acc1(cfg.thetaddot_cutoff_hz, dt),
        lp_acc2(cfg.thetaddot_cutoff_hz, dt),
        lp_faz(cfg.estimate_cutoff_hz, dt),
        lp_tau(cfg.estimate_cutoff_hz, dt) {}
};

struct OuterInputs {
  double z_d, zdot_d, zddot_d; // downrange reference
  double xddot_d;              // vertical acceleration reference
  double sm;                   // static margin from the nominal air-data view
  double g;                    // gravity at the current altitude
  double diameter_m;
};

struct PitchCommand {
  double theta_d, thetadot_d, thetaddot_d;
  double u_out;    // linearized lateral channel command
  double faz_hat;  // indirect lateral force estimate [N]
  double v_out;
  bool clamped;
};

// One outer cycle: integral update, virtual input, indirect estimate,
// linearizing command, pitch extraction, then the reference-derivative
// filters (backward differences through the low-pass stages).
PitchCommand outer_step(const RigidBodyState& state, const MassState& ms,
                        const AdaptiveState& ad, const OuterInputs& in, const OuterConfig& cfg,
                        OuterState& st, double dt);

} // namespace tvcsim
