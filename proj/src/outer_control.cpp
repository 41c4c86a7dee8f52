#include "tvcsim/outer_control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace tvcsim {

namespace {

constexpr double kPi = 3.141592653589793;
constexpr double kHalfPi = 1.5707963267948966;

// Solves A' P + P A = -C for symmetric P by vectorization.
Eigen::Matrix3d solve_lyapunov(const Eigen::Matrix3d& a, const Eigen::Matrix3d& c) {
  Eigen::Matrix<double, 9, 9> m = Eigen::Matrix<double, 9, 9>::Zero();
  // vec(A'P) = (I kron A') vec(P); vec(PA) = (A' kron I) vec(P), column-major vec.
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        m(3 * j + i, 3 * j + k) += a(k, i);  // I kron A'
        m(3 * j + i, 3 * k + i) += a(k, j);  // A' kron I
      }
  const Eigen::Matrix<double, 9, 1> rhs = -Eigen::Map<const Eigen::Matrix<double, 9, 1>>(c.data());
  const Eigen::Matrix<double, 9, 1> vp = m.fullPivLu().solve(rhs);
  Eigen::Matrix3d p = Eigen::Map<const Eigen::Matrix3d>(vp.data());
  return 0.5 * (p + p.transpose());
}

bool is_hurwitz(const Eigen::Matrix3d& m) {
  const Eigen::EigenSolver<Eigen::Matrix3d> es(m);
  for (int i = 0; i < 3; ++i)
    if (es.eigenvalues()[i].real() >= 0.0)
      return false;
  return true;
}

} // namespace

OuterGains lqr_design(const Eigen::Vector3d& q_diag, double r) {
  if (r <= 0.0)
    throw std::invalid_argument("lqr_design: R must be positive");
  if ((q_diag.array() < 0.0).any() || q_diag.maxCoeff() <= 0.0)
    throw std::invalid_argument("lqr_design: Q must be nonnegative and nonzero");

  Eigen::Matrix3d a;
  a << 0, 1, 0, 0, 0, 0, 1, 0, 0;
  const Eigen::Vector3d b{0, 1, 0};
  const Eigen::Matrix3d q = q_diag.asDiagonal();

  // Any K with s^3 + K2 s^2 + K1 s + K3 Hurwitz works as a start.
  Eigen::RowVector3d k{2.0, 2.0, 1.0};
  Eigen::Matrix3d p = Eigen::Matrix3d::Zero();
  for (int it = 0; it < 100; ++it) {
    const Eigen::Matrix3d acl = a - b * k;
    if (!is_hurwitz(acl))
      throw std::runtime_error("lqr_design: iterate lost stability");
    p = solve_lyapunov(acl, q + k.transpose() * r * k);
    const Eigen::RowVector3d k_next = (b.transpose() * p) / r;
    const double step = (k_next - k).cwiseAbs().maxCoeff();
    k = k_next;
    if (step < 1e-13)
      break;
  }

  // Riccati residual guards against silent non-convergence.
  const Eigen::Matrix3d res =
      a.transpose() * p + p * a - p * b * b.transpose() * p / r + q;
  if (res.cwiseAbs().maxCoeff() > 1e-9)
    throw std::runtime_error("lqr_design: Riccati iteration did not converge");

  return {k[0], k[1], k[2]};
}

LowPass::LowPass(double cutoff_hz, double dt) {
  if (cutoff_hz <= 0.0 || dt <= 0.0)
    throw std::invalid_argument("LowPass: cutoff and dt must be positive");
  const double tau = 1.0 / (2.0 * kPi * cutoff_hz);
  alpha_ = dt / (tau + dt);
}

double LowPass::step(double u) {
  y_ += alpha_ * (u - y_);
  return y_;
}

double indirect_faz_estimate(double theta, double fax_hat, double tau_hat, double sm,
                             double dbar) {
  const double arm = sm * dbar;
  if (arm == 0.0)
    throw std::invalid_argument("indirect_faz_estimate: zero static margin");
  const double f_n = tau_hat / arm; // body-frame normal force estimate
  return std::cos(theta) * f_n - std::tan(theta) * (fax_hat - std::sin(theta) * f_n);
}

double outer_virtual_input(double e_z, double edot_z, double zeta, const OuterGains& g) {
  return -g.k_z * e_z - g.k_zdot * edot_z - g.k_i * zeta;
}

PitchExtraction extract_pitch_reference(double a_hat, double b_hat, double u_out,
                                        double singularity_margin_rad) {
  const double c = std::hypot(a_hat, u_out);
  if (c < 1e-12)
    throw ControlSingularity("pitch reference extraction is degenerate (a_hat = u_out = 0)");

  double arg = b_hat / c;
  const bool clamped = std::abs(arg) > 1.0;
  arg = std::clamp(arg, -1.0, 1.0);

  // a tan(th) + b/cos(th) = u  <=>  u cos(th) - a sin(th) = b, whose
  // solutions are th = -phi -/+ acos(b/c) with phi = atan2(a, u).
  const double half = std::acos(arg);
  const double phi = std::atan2(a_hat, u_out);
  const double cand1 = std::remainder(-phi - half, 2.0 * kPi);
  const double cand2 = std::remainder(-phi + half, 2.0 * kPi);
  const double theta_d = std::abs(cand1) <= std::abs(cand2) ? cand1 : cand2;

  if (std::abs(theta_d) >= kHalfPi - singularity_margin_rad)
    throw ControlSingularity("pitch reference outside the +/-90 deg envelope");
  return {theta_d, clamped};
}

PitchCommand outer_step(const RigidBodyState& state, const MassState& ms,
                        const AdaptiveState& ad, const OuterInputs& in, const OuterConfig& cfg,
                        OuterState& st, double dt) {
  const double e_z = state.z - in.z_d;
  const double edot_z = state.zdot - in.zdot_d;
  st.zeta += e_z * dt;

  PitchCommand out{};
  out.v_out = outer_virtual_input(e_z, edot_z, st.zeta, cfg.gains);

  if (std::abs(in.sm) >= cfg.sm_min) {
    st.last_faz_hat =
        indirect_faz_estimate(state.theta, ad.fax_hat_n, ad.tau_hat_nm, in.sm, in.diameter_m);
  }
  out.faz_hat = st.lp_faz.step(st.last_faz_hat);

  out.u_out = in.zddot_d - out.faz_hat / ms.m + out.v_out;

  // The extraction solves for a self-consistent theta_d; wiring the raw
  // estimates (or theta_d's own filtered second derivative) into a_hat and
  // b_hat closes fast positive-feedback loops through e_theta and the
  // adaptation integrators. The estimates are therefore low-passed to the
  // outer-loop timescale and the angular-acceleration feedforward term is
  // left to the inner loop, where it enters exactly.
  const double a_hat = -in.g + ad.fax_hat_n / ms.m - in.xddot_d;
  const double b_hat = -st.lp_tau.step(ad.tau_hat_nm) / (ms.m * ms.l);
  const PitchExtraction ext =
      extract_pitch_reference(a_hat, b_hat, out.u_out, cfg.singularity_margin_rad);
  out.theta_d = ext.theta_d;
  out.clamped = ext.clamped;

  // Reference derivatives: backward differences smoothed by the low-pass
  // stages. The first cycle primes the memory so derivatives start at zero.
  if (!st.primed) {
    st.prev_theta_d = out.theta_d;
    st.primed = true;
  }
  const double rate_raw = (out.theta_d - st.prev_theta_d) / dt;
  st.prev_theta_d = out.theta_d;
  out.thetadot_d = st.lp_rate.step(rate_raw);

  const double acc_raw = (out.thetadot_d - st.prev_thetadot_f) / dt;
  st.prev_thetadot_f = out.thetadot_d;
  out.thetaddot_d = st.lp_acc2.step(st.lp_acc1.step(acc_raw));

  return out;
}

} // namespace tvcsim
