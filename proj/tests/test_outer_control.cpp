#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "tvcsim/outer_control.hpp"
#include "tvcsim/vehicle.hpp"

using namespace tvcsim;

namespace {

// Independent Riccati route: stable invariant subspace of the Hamiltonian
//   H = [A  -B R^-1 B'; -Q  -A'],  P = Re(Y X^-1),  K = B' P / R.
OuterGains hamiltonian_lqr(const Eigen::Vector3d& q_diag, double r) {
  Eigen::Matrix3d a;
  a << 0, 1, 0, 0, 0, 0, 1, 0, 0;
  const Eigen::Vector3d b{0, 1, 0};

  Eigen::Matrix<double, 6, 6> h;
  h.topLeftCorner<3, 3>() = a;
  h.topRightCorner<3, 3>() = -b * b.transpose() / r;
  h.bottomLeftCorner<3, 3>() = -Eigen::Matrix3d(q_diag.asDiagonal());
  h.bottomRightCorner<3, 3>() = -a.transpose();

  const Eigen::EigenSolver<Eigen::Matrix<double, 6, 6>> es(h);
  Eigen::Matrix3cd x, y;
  int n = 0;
  for (int i = 0; i < 6; ++i) {
    if (es.eigenvalues()[i].real() < 0.0 && n < 3) {
      x.col(n) = es.eigenvectors().block<3, 1>(0, i);
      y.col(n) = es.eigenvectors().block<3, 1>(3, i);
      ++n;
    }
  }
  REQUIRE(n == 3);
  const Eigen::Matrix3d p = (y * x.inverse()).real();
  const Eigen::RowVector3d k = b.transpose() * p / r;
  return {k[0], k[1], k[2]};
}

const VehicleModel kVm;

} // namespace

TEST_CASE("lqr gains for the default weights match the frozen set") {
  const OuterGains k = lqr_design({5.0, 1.0, 1.0}, 60.0);
  CHECK(std::abs(k.k_z - 0.608342) < 5e-6);
  CHECK(std::abs(k.k_zdot - 1.110563) < 5e-6);
  CHECK(std::abs(k.k_i - 0.129099) < 5e-6);
  // The integral gain of this plant is exactly sqrt(q_zint / r).
  CHECK(k.k_i == doctest::Approx(std::sqrt(1.0 / 60.0)).epsilon(1e-10));
}

TEST_CASE("unit weights recover the analytic spectral factor") {
  // For Q = I, R = 1 the closed-loop polynomial factors in closed form as
  // (s + 1)(s^2 + sqrt(2) s + 1), so K = (1 + sqrt(2), 1 + sqrt(2), 1).
  const OuterGains k = lqr_design({1.0, 1.0, 1.0}, 1.0);
  const double sq2 = std::sqrt(2.0);
  CHECK(k.k_z == doctest::Approx(1.0 + sq2).epsilon(1e-7));
  CHECK(k.k_zdot == doctest::Approx(1.0 + sq2).epsilon(1e-7));
  CHECK(k.k_i == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("lqr agrees with the Hamiltonian eigenvector route") {
  auto agree = [](const Eigen::Vector3d& q, double r) {
    const OuterGains a = lqr_design(q, r);
    const OuterGains b = hamiltonian_lqr(q, r);
    CHECK(a.k_z == doctest::Approx(b.k_z).epsilon(1e-6));
    CHECK(a.k_zdot == doctest::Approx(b.k_zdot).epsilon(1e-6));
    CHECK(a.k_i == doctest::Approx(b.k_i).epsilon(1e-6));
  };
  agree({5.0, 1.0, 1.0}, 60.0);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uq(0.2, 10.0);
  std::uniform_real_distribution<double> ur(0.5, 50.0);
  for (int i = 0; i < 10; ++i)
    agree({uq(rng), uq(rng), uq(rng)}, ur(rng));
}

TEST_CASE("lqr gains satisfy the return-difference identities") {
  // Spectral factorization of this plant forces, with (b, a, c) = K,
  //   a^2 - 2b = q_zdot / r,  b^2 - 2ac = q_z / r,  c^2 = q_zint / r.
  auto identities = [](const Eigen::Vector3d& q, double r) {
    const OuterGains k = lqr_design(q, r);
    const double a = k.k_zdot, b = k.k_z, c = k.k_i;
    CHECK(a * a - 2.0 * b == doctest::Approx(q[1] / r).epsilon(1e-9).scale(1.0));
    CHECK(b * b - 2.0 * a * c == doctest::Approx(q[0] / r).epsilon(1e-9).scale(1.0));
    CHECK(c * c == doctest::Approx(q[2] / r).epsilon(1e-9).scale(1.0));
  };
  identities({5.0, 1.0, 1.0}, 60.0);
  identities({1.0, 1.0, 1.0}, 1.0);

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uq(0.2, 10.0);
  std::uniform_real_distribution<double> ur(0.5, 50.0);
  for (int i = 0; i < 10; ++i)
    identities({uq(rng), uq(rng), uq(rng)}, ur(rng));
}

TEST_CASE("closed outer loop has the frozen pole set") {
  const OuterGains k = lqr_design({5.0, 1.0, 1.0}, 60.0);
  Eigen::Matrix3d acl;
  acl << 0, 1, 0, -k.k_z, -k.k_zdot, -k.k_i, 1, 0, 0;
  const Eigen::EigenSolver<Eigen::Matrix3d> es(acl);

  bool saw_real = false;
  int complex_count = 0;
  for (int i = 0; i < 3; ++i) {
    const std::complex<double> s = es.eigenvalues()[i];
    CHECK(s.real() < 0.0);
    if (std::abs(s.imag()) < 1e-9) {
      saw_real = true;
      CHECK(std::abs(s.real() - (-0.397)) < 2e-3);
    } else {
      ++complex_count;
      CHECK(std::abs(s.real() - (-0.357)) < 2e-3);
      CHECK(std::abs(std::abs(s.imag()) - 0.445) < 2e-3);
    }
  }
  CHECK(saw_real);
  CHECK(complex_count == 2);
}

TEST_CASE("lqr rejects bad weights") {
  CHECK_THROWS_AS(lqr_design({1, 1, 1}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(lqr_design({1, 1, 1}, -2.0), std::invalid_argument);
  CHECK_THROWS_AS(lqr_design({-1, 1, 1}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lqr_design({0, 0, 0}, 1.0), std::invalid_argument);
}

TEST_CASE("low-pass filter recursion and DC gain") {
  CHECK_THROWS_AS(LowPass(0.0, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(LowPass(1.0, 0.0), std::invalid_argument);

  const double dt = 0.01, f = 2.0;
  const double tau = 1.0 / (2.0 * 3.141592653589793 * f);
  const double alpha = dt / (tau + dt);

  LowPass lp(f, dt);
  CHECK(lp.value() == 0.0);
  CHECK(lp.step(1.0) == doctest::Approx(alpha).epsilon(1e-14));

  // Exact recursion against a test-side replica over random inputs.
  double y = alpha;
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng);
    y += alpha * (x - y);
    CHECK(lp.step(x) == doctest::Approx(y).epsilon(1e-14).scale(1.0));
  }

  // Unit DC gain: a held input converges to itself.
  LowPass dc(0.5, 0.01);
  for (int i = 0; i < 5000; ++i)
    dc.step(3.7);
  CHECK(dc.value() == doctest::Approx(3.7).epsilon(1e-9));
}

TEST_CASE("indirect lateral force estimate inverts the force geometry") {
  // Build inertial-x force and pitch moment from a known body-frame force,
  // then demand the exact lateral component back.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uf(-5000.0, 5000.0);
  std::uniform_real_distribution<double> ut(-80.0 * 0.017453292519943295,
                                            80.0 * 0.017453292519943295);
  std::uniform_real_distribution<double> us(0.01, 8.0);
  std::uniform_int_distribution<int> sign(0, 1);

  for (int i = 0; i < 10000; ++i) {
    const double fbx = uf(rng), fbz = uf(rng), theta = ut(rng);
    const double sm = (sign(rng) ? 1.0 : -1.0) * us(rng);
    const double d = 0.5;
    const double c = std::cos(theta), s = std::sin(theta);
    const double fax = c * fbx + s * fbz;
    const double faz = -s * fbx + c * fbz;
    const double tau = fbz * sm * d;
    const double got = indirect_faz_estimate(theta, fax, tau, sm, d);
    CHECK(std::abs(got - faz) < 1e-8 * std::max(1.0, std::abs(faz)));
  }

  CHECK_THROWS_AS(indirect_faz_estimate(0.1, 100.0, 50.0, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("outer virtual input is the PI-D law") {
  const OuterGains g{0.61, 1.11, 0.13};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 50; ++i) {
    const double e = u(rng), ed = u(rng), z = u(rng);
    CHECK(outer_virtual_input(e, ed, z, g) ==
          doctest::Approx(-0.61 * e - 1.11 * ed - 0.13 * z).epsilon(1e-14).scale(1.0));
  }
}

TEST_CASE("pitch reference extraction solves its equation on the small branch") {
  const double margin = 5.0 * 0.017453292519943295;
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> ua(0.5, 30.0);
  std::uniform_real_distribution<double> ub(-20.0, 20.0);
  std::uniform_real_distribution<double> ut(-80.0 * 0.017453292519943295,
                                            80.0 * 0.017453292519943295);
  std::uniform_int_distribution<int> sign(0, 1);

  for (int i = 0; i < 10000; ++i) {
    const double a = (sign(rng) ? 1.0 : -1.0) * ua(rng);
    const double b = ub(rng);
    const double theta = ut(rng);
    const double u = a * std::tan(theta) + b / std::cos(theta);

    const PitchExtraction ext = extract_pitch_reference(a, b, u, margin);
    const double resid =
        a * std::tan(ext.theta_d) + b / std::cos(ext.theta_d) - u;
    CHECK(std::abs(resid) < 1e-8 * std::max(1.0, std::abs(u)));
    CHECK(std::abs(ext.theta_d) <= std::abs(theta) + 1e-9);
    CHECK(!ext.clamped);
  }
}

TEST_CASE("pitch reference extraction edge behavior") {
  const double margin = 5.0 * 0.017453292519943295;

  // Unreachable offset: the arccos argument saturates and the solver
  // reports the clamp while returning the closest feasible angle.
  const PitchExtraction clamped = extract_pitch_reference(0.0, 10.0 + 1e-6, 10.0, margin);
  CHECK(clamped.clamped);
  CHECK(clamped.theta_d == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));

  // Both branches land on -90 deg: refuse.
  CHECK_THROWS_WITH_AS(extract_pitch_reference(10.0, 10.0, 0.0, margin),
                       doctest::Contains("envelope"), ControlSingularity);

  // a_hat = u_out = 0 leaves the angle undefined.
  CHECK_THROWS_WITH_AS(extract_pitch_reference(0.0, 1.0, 0.0, margin),
                       doctest::Contains("degenerate"), ControlSingularity);
}

TEST_CASE("outer step primes derivative filters on the first cycle") {
  const OuterConfig cfg;
  const double dt = 0.01;
  OuterState st(cfg, dt);
  const MassState ms = evaluate_mass_state(kVm, 650.0);

  RigidBodyState s{};
  s.z = 10.0;
  s.zdot = 1.0;
  const OuterInputs in{0.0, 0.0, 0.0, 0.0, 1.5, 9.8, kVm.diameter_m};

  const PitchCommand c1 = outer_step(s, ms, {}, in, cfg, st, dt);
  CHECK(c1.thetadot_d == 0.0);
  CHECK(c1.thetaddot_d == 0.0);
  CHECK(c1.theta_d > 0.0); // positive downrange error tilts the nose back
}

TEST_CASE("outer step integrates before the virtual input and replays exactly") {
  OuterConfig cfg;
  cfg.gains = {0.0, 0.0, 1.0}; // integral-only isolates the zeta path
  const double dt = 0.01;
  OuterState st(cfg, dt);
  const MassState ms = evaluate_mass_state(kVm, 650.0);

  RigidBodyState s{};
  s.z = 100.0;
  const OuterInputs in{0.0, 0.0, 0.0, 0.0, 1.5, 9.8, kVm.diameter_m};

  // zeta is updated before v_out, so the first cycle already sees e_z dt.
  const PitchCommand c1 = outer_step(s, ms, {}, in, cfg, st, dt);
  CHECK(c1.v_out == doctest::Approx(-100.0 * dt).epsilon(1e-14));
  CHECK(c1.u_out == doctest::Approx(c1.v_out).epsilon(1e-14)); // zero estimates, zero zddot_d

  const PitchCommand c2 = outer_step(s, ms, {}, in, cfg, st, dt);
  CHECK(c2.v_out == doctest::Approx(-200.0 * dt).epsilon(1e-14));

  // With zero estimates the extraction reduces to tan(theta) = u / (-g),
  // and the derivative filters reduce to scaled backward differences.
  const double th1 = std::atan(c1.u_out / -9.8);
  const double th2 = std::atan(c2.u_out / -9.8);
  CHECK(c1.theta_d == doctest::Approx(th1).epsilon(1e-12));
  CHECK(c2.theta_d == doctest::Approx(th2).epsilon(1e-12));

  const double pi = 3.141592653589793;
  const double a_rate = dt / (1.0 / (2.0 * pi * cfg.thetadot_cutoff_hz) + dt);
  const double a_acc = dt / (1.0 / (2.0 * pi * cfg.thetaddot_cutoff_hz) + dt);
  const double rate2 = (th2 - th1) / dt;
  CHECK(c2.thetadot_d == doctest::Approx(a_rate * rate2).epsilon(1e-12));
  CHECK(c2.thetaddot_d ==
        doctest::Approx(a_acc * a_acc * (a_rate * rate2 / dt)).epsilon(1e-12));
}

TEST_CASE("outer step holds the lateral estimate under a vanishing static margin") {
  OuterConfig cfg;
  cfg.sm_min = 0.1;
  const double dt = 0.01;
  OuterState st(cfg, dt);
  const MassState ms = evaluate_mass_state(kVm, 650.0);

  RigidBodyState s{};
  s.theta = 0.2;
  const AdaptiveState ad{800.0, -120.0};
  OuterInputs in{0.0, 0.0, 0.0, 0.0, 1.5, 9.8, kVm.diameter_m};

  const double f1 = indirect_faz_estimate(0.2, 800.0, -120.0, 1.5, kVm.diameter_m);
  const double pi = 3.141592653589793;
  const double a_f = dt / (1.0 / (2.0 * pi * cfg.estimate_cutoff_hz) + dt);

  const PitchCommand c1 = outer_step(s, ms, ad, in, cfg, st, dt);
  CHECK(c1.faz_hat == doctest::Approx(a_f * f1).epsilon(1e-12).scale(1.0));

  // Below the floor the raw estimate is frozen; only the filter advances.
  in.sm = 0.01;
  const PitchCommand c2 = outer_step(s, ms, ad, in, cfg, st, dt);
  const double y2 = a_f * f1 + a_f * (f1 - a_f * f1);
  CHECK(c2.faz_hat == doctest::Approx(y2).epsilon(1e-12).scale(1.0));
}
