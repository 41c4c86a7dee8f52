#include "tvcsim/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

#include "tvcsim/atmosphere.hpp"
#include "tvcsim/rng.hpp"

namespace tvcsim {

namespace {

constexpr double kHalfPi = 1.5707963267948966;

// Plant-side mass view: dispersion multipliers applied to the nominal
// mass-property trajectory. The moment arm follows the perturbed CM.
MassState scale_mass(const MassState& ms, const ParamScales& s, double gimbal_station_m) {
  const double x_cm = ms.x_cm * s.xcm;
  return {ms.m * s.m, ms.j_y * s.j, x_cm, gimbal_station_m - x_cm, ms.propellant_kg};
}

// The controller's air-data view: nominal atmosphere and mean wind only.
// Gusts and dispersions are unmeasured disturbances.
double controller_static_margin(const RigidBodyState& st, const WindModel& wm,
                                const AeroTables& tables, const MassState& ms_nom,
                                double diameter_m) {
  const double alt = std::max(st.x, -100.0);
  const AtmoSample atm = sample_atmosphere(alt);
  const Eigen::Vector2d v_rel_b =
      rotation_matrix(st.theta).transpose() *
      Eigen::Vector2d(st.xdot, st.zdot - wm.mean_wind_z(alt));
  const double speed = v_rel_b.norm();
  double alpha = 0.0, mach = 0.0;
  if (speed > 0.0) {
    alpha = std::atan2(v_rel_b[1], v_rel_b[0]);
    mach = speed / atm.speed_of_sound_mps;
  }
  const double x_cp = aero_coefficients(alpha, mach, tables).x_cp_m;
  return (x_cp - ms_nom.x_cm) / diameter_m;
}

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

McStat stat_of(const std::vector<double>& v) {
  McStat s;
  if (v.empty())
    return s;
  s.min = s.max = v.front();
  double sum = 0.0;
  for (double x : v) {
    sum += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v)
    ss += (x - s.mean) * (x - s.mean);
  s.stdev = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return s;
}

} // namespace

FlightResult run_flight(const SimConfig& cfg, const ParamScales& scales, bool keep_log,
                        std::optional<std::uint64_t> gust_seed_override) {
  const VehicleModel& vm = cfg.vehicle;
  const Plant plant{vm, cfg.aero, {scales.cl, scales.cd, scales.xcp}, cfg.aero_enabled};

  GustParams gust = cfg.gust;
  if (gust_seed_override)
    gust.seed = *gust_seed_override;
  WindModel wm(cfg.wind_profile, gust, cfg.dt);

  OuterConfig ocfg;
  ocfg.gains = lqr_design(cfg.lqr_q, cfg.lqr_r);
  ocfg.thetadot_cutoff_hz = cfg.thetadot_cutoff_hz;
  ocfg.thetaddot_cutoff_hz = cfg.thetaddot_cutoff_hz;
  ocfg.estimate_cutoff_hz = cfg.estimate_cutoff_hz;
  ocfg.sm_min = cfg.sm_min;
  ocfg.singularity_margin_rad = cfg.inner.singularity_margin_rad;

  const int per_tick = cfg.steps_per_control_cycle();
  const double dt_ctl = cfg.dt * per_tick;
  OuterState ost(ocfg, dt_ctl);
  AdaptiveState ad{};
  MassState ms_nom = evaluate_mass_state(vm, vm.propellant_mass_kg);
  RigidBodyState state{};
  std::optional<ControlCommand> cmd;

  FlightResult out;
  bool stable = true;
  std::string failure;

  auto env_at = [&](double alt, double) {
    const double a_clamped = std::max(alt, -100.0);
    const AtmoSample a = sample_atmosphere(a_clamped);
    return EnvSample{a.pressure_pa, a.density_kgpm3, a.speed_of_sound_mps, gravity(alt),
                     wm.sample(a_clamped)};
  };

  double t = 0.0;
  for (long step = 0;; ++step) {
    t = static_cast<double>(step) * cfg.dt;
    if (!cfg.freeze_mass && ms_nom.propellant_kg <= 0.0)
      break; // burnout
    if (t >= cfg.t_max - 0.5 * cfg.dt)
      break;

    const MassState ms_true = scale_mass(ms_nom, scales, vm.gimbal_station_m);

    if (step % per_tick == 0) {
      const ReferenceSample ref = sample_reference(cfg.profile, t);

      if (!(std::isfinite(state.x) && std::isfinite(state.xdot) && std::isfinite(state.z) &&
            std::isfinite(state.zdot) && std::isfinite(state.theta) && std::isfinite(state.q))) {
        stable = false;
        failure = "non-finite state";
        break;
      }
      if (std::abs(state.theta) >= kHalfPi - cfg.inner.singularity_margin_rad) {
        stable = false;
        failure = "pitch left the +/-90 deg envelope";
        break;
      }
      if (std::abs(state.z - ref.z_d) > 10000.0) {
        stable = false;
        failure = "downrange error exceeded 10 km";
        break;
      }
      if (state.x < -90.0) {
        stable = false;
        failure = "altitude below ground";
        break;
      }

      try {
        const double g_now = gravity(state.x);
        const double sm_ctl =
            cfg.aero_enabled
                ? controller_static_margin(state, wm, cfg.aero, ms_nom, vm.diameter_m)
                : 1.0; // aero disabled: estimates stay at zero, any margin works
        const PitchCommand pc =
            outer_step(state, ms_nom, ad,
                       {ref.z_d, ref.zdot_d, ref.zddot_d, ref.xddot_d, sm_ctl, g_now,
                        vm.diameter_m},
                       ocfg, ost, dt_ctl);
        const AdaptiveState ad_used = ad; // estimates behind this tick's command
        const InnerResult ir = inner_step(
            state, ms_nom, ad,
            {ref.x_d, ref.xdot_d, ref.xddot_d, pc.theta_d, pc.thetadot_d, pc.thetaddot_d},
            cfg.inner, g_now, dt_ctl, cfg.actuator, cmd);
        ad = ir.ad;
        cmd = ir.cmd;

        const EnvSample env_true = env_at(state.x, t);
        const ForcesMoments fm = plant.forces(state, ms_true, env_true);
        const double a_true = -env_true.g + fm.f_a_i[0] / ms_true.m - ref.xddot_d;
        const double b_true =
            (ms_true.j_y * pc.thetaddot_d - fm.tau_a) / (ms_true.m * ms_true.l);
        const double delta = a_true * std::tan(state.theta) +
                             b_true / std::cos(state.theta) - pc.u_out;

        out.log.rows.push_back({t, state.x, state.xdot, state.z, state.zdot, state.theta,
                                state.q, ir.cmd.thrust_n, ir.cmd.gimbal_rad, ref.x_d, ref.z_d,
                                pc.theta_d, ir.err.e_x, state.z - ref.z_d, ir.err.e_t,
                                fm.f_a_i[0], ad_used.fax_hat_n, fm.tau_a, ad_used.tau_hat_nm,
                                fm.f_a_i[1], pc.faz_hat, delta, fm.alpha_rad, fm.mach,
                                fm.qbar_pa});
      } catch (const ControlSingularity& e) {
        stable = false;
        failure = e.what();
        break;
      }
    }

    const ControlCommand held = *cmd;
    const double p_amb = sample_atmosphere(std::max(state.x, -100.0)).pressure_pa;
    state = step_rk4(state, ms_true, held, plant, env_at, t, cfg.dt);
    if (!cfg.freeze_mass) {
      const double mdot = mass_flow_rate(held.thrust_n, p_amb, vm);
      ms_nom = update_mass_state(ms_nom, vm, mdot, cfg.dt);
    }
    wm.advance();
  }

  out.metrics = compute_metrics(out.log);
  out.metrics.stable = stable;
  out.metrics.failure = failure;
  out.metrics.end_time_s = t;
  out.metrics.end_altitude_m = state.x;
  out.metrics.end_vspeed_mps = state.xdot;
  out.metrics.end_downrange_m = state.z;
  if (!keep_log)
    out.log.rows.clear();
  return out;
}

RunMetrics compute_metrics(const FlightLog& log) {
  RunMetrics m;
  m.ticks = static_cast<int>(log.rows.size());
  if (log.rows.empty())
    return m;

  double se_x = 0, se_z = 0, se_t = 0, s_thrust = 0, s_mu = 0;
  double se_fax = 0, se_tau = 0, se_faz = 0;
  double st_fax = 0, st_tau = 0, st_faz = 0;
  for (const FlightLogRow& r : log.rows) {
    se_x += r.e_x * r.e_x;
    se_z += r.e_z * r.e_z;
    se_t += r.e_theta * r.e_theta;
    s_thrust += r.thrust_n * r.thrust_n;
    s_mu += r.gimbal_rad * r.gimbal_rad;
    se_fax += (r.fax_hat - r.fax_true) * (r.fax_hat - r.fax_true);
    se_tau += (r.tau_hat - r.tau_true) * (r.tau_hat - r.tau_true);
    se_faz += (r.faz_hat - r.faz_true) * (r.faz_hat - r.faz_true);
    st_fax += r.fax_true * r.fax_true;
    st_tau += r.tau_true * r.tau_true;
    st_faz += r.faz_true * r.faz_true;
    m.max_qbar_pa = std::max(m.max_qbar_pa, r.qbar_pa);
    m.max_abs_alpha_rad = std::max(m.max_abs_alpha_rad, std::abs(r.alpha_rad));
    m.max_abs_gimbal_rad = std::max(m.max_abs_gimbal_rad, std::abs(r.gimbal_rad));
  }
  const double n = static_cast<double>(log.rows.size());
  m.rmse_x_m = std::sqrt(se_x / n);
  m.rmse_z_m = std::sqrt(se_z / n);
  m.rmse_theta_rad = std::sqrt(se_t / n);
  m.rms_thrust_n = std::sqrt(s_thrust / n);
  m.rms_gimbal_rad = std::sqrt(s_mu / n);
  m.est_rmse_fax_n = std::sqrt(se_fax / n);
  m.est_rmse_tau_nm = std::sqrt(se_tau / n);
  m.est_rmse_faz_n = std::sqrt(se_faz / n);

  auto pct = [](double err_rms, double true_ss, double n_) {
    const double denom = std::sqrt(true_ss / n_);
    if (denom < 1e-12)
      return err_rms < 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
    return 100.0 * err_rms / denom;
  };
  m.est_pct_fax = pct(m.est_rmse_fax_n, st_fax, n);
  m.est_pct_tau = pct(m.est_rmse_tau_nm, st_tau, n);
  m.est_pct_faz = pct(m.est_rmse_faz_n, st_faz, n);
  return m;
}

McResult run_monte_carlo(const SimConfig& cfg) {
  const int n = cfg.mc.runs;
  McResult mc;
  mc.records.resize(n);

  auto run_one = [&](int i) {
    std::mt19937_64 prng(derive_seed(cfg.mc.seed, 2ull * static_cast<std::uint64_t>(i)));
    auto draw = [&](double s3) {
      if (s3 <= 0.0)
        return 1.0;
      const double k = 1.0 + (s3 / 3.0) * normal_variate(prng);
      return std::clamp(k, 1.0 - s3, 1.0 + s3); // truncate at 3 sigma
    };
    ParamScales s;
    s.m = draw(cfg.mc.sigma3_mass);
    s.j = draw(cfg.mc.sigma3_inertia);
    s.xcm = draw(cfg.mc.sigma3_xcm);
    s.xcp = draw(cfg.mc.sigma3_xcp);
    s.cd = draw(cfg.mc.sigma3_cd);
    s.cl = draw(cfg.mc.sigma3_cl);
    const std::uint64_t gseed =
        derive_seed(cfg.mc.seed, 2ull * static_cast<std::uint64_t>(i) + 1ull);
    const FlightResult r = run_flight(cfg, s, /*keep_log=*/false, gseed);
    mc.records[i] = {i, s, r.metrics};
  };

  const unsigned workers =
      std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                         static_cast<unsigned>(n));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i)
      run_one(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
          run_one(i);
      });
    for (std::thread& th : pool)
      th.join();
  }

  // Aggregation in record order: independent of worker scheduling.
  McSummary& s = mc.summary;
  s.runs = n;
  std::vector<double> rx, rz, rt, th, mu, alt, vsp;
  for (const McRunRecord& rec : mc.records) {
    if (!rec.metrics.stable) {
      s.unstable_indices.push_back(rec.index);
      continue;
    }
    ++s.stable_runs;
    rx.push_back(rec.metrics.rmse_x_m);
    rz.push_back(rec.metrics.rmse_z_m);
    rt.push_back(rec.metrics.rmse_theta_rad * kRad2Deg);
    th.push_back(rec.metrics.rms_thrust_n);
    mu.push_back(rec.metrics.rms_gimbal_rad * kRad2Deg);
    alt.push_back(rec.metrics.end_altitude_m);
    vsp.push_back(rec.metrics.end_vspeed_mps);
  }
  s.rmse_x = stat_of(rx);
  s.rmse_z = stat_of(rz);
  s.rmse_theta_deg = stat_of(rt);
  s.rms_thrust = stat_of(th);
  s.rms_gimbal_deg = stat_of(mu);
  s.end_altitude = stat_of(alt);
  s.end_vspeed = stat_of(vsp);
  return mc;
}

void write_flight_csv(std::ostream& os, const FlightLog& log) {
  os << "t,x,xdot,z,zdot,theta,q,T,mu,x_d,z_d,theta_d,e_x,e_z,e_theta,"
        "fax_true,fax_hat,tau_true,tau_hat,faz_true,faz_hat,delta,alpha,mach,qbar\n";
  for (const FlightLogRow& r : log.rows) {
    const double cols[] = {r.t,        r.x,       r.xdot,    r.z,        r.zdot,
                           r.theta,    r.q,       r.thrust_n, r.gimbal_rad, r.x_d,
                           r.z_d,      r.theta_d, r.e_x,     r.e_z,      r.e_theta,
                           r.fax_true, r.fax_hat, r.tau_true, r.tau_hat,  r.faz_true,
                           r.faz_hat,  r.delta,   r.alpha_rad, r.mach,    r.qbar_pa};
    for (std::size_t i = 0; i < std::size(cols); ++i)
      os << (i ? "," : "") << csv_num(cols[i]);
    os << "\n";
  }
}

std::string flight_csv(const FlightLog& log) {
  std::ostringstream os;
  write_flight_csv(os, log);
  return os.str();
}

void write_mc_csv(std::ostream& os, const McResult& mc) {
  os << "run,scale_m,scale_jy,scale_xcm,scale_xcp,scale_cd,scale_cl,stable,"
        "end_time_s,end_altitude_m,end_vspeed_mps,end_downrange_m,"
        "rmse_x_m,rmse_z_m,rmse_theta_deg,rms_thrust_n,rms_gimbal_deg,max_qbar_pa\n";
  for (const McRunRecord& r : mc.records) {
    const RunMetrics& m = r.metrics;
    os << r.index << "," << csv_num(r.scales.m) << "," << csv_num(r.scales.j) << ","
       << csv_num(r.scales.xcm) << "," << csv_num(r.scales.xcp) << "," << csv_num(r.scales.cd)
       << "," << csv_num(r.scales.cl) << "," << (m.stable ? 1 : 0) << ","
       << csv_num(m.end_time_s) << "," << csv_num(m.end_altitude_m) << ","
       << csv_num(m.end_vspeed_mps) << "," << csv_num(m.end_downrange_m) << ","
       << csv_num(m.rmse_x_m) << "," << csv_num(m.rmse_z_m) << ","
       << csv_num(m.rmse_theta_rad * kRad2Deg) << "," << csv_num(m.rms_thrust_n) << ","
       << csv_num(m.rms_gimbal_rad * kRad2Deg) << "," << csv_num(m.max_qbar_pa) << "\n";
  }
}

namespace {

void stat_row(std::ostringstream& os, const char* name, const McStat& s, const char* unit) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "  %-18s %12.4g %12.4g %12.4g %12.4g  %s\n", name, s.mean,
                s.stdev, s.min, s.max, unit);
  os << buf;
}

} // namespace

std::string mc_table(const McResult& mc) {
  std::ostringstream os;
  os << "dispersed campaign: " << mc.summary.runs << " runs, " << mc.summary.stable_runs
     << " stable\n";
  if (!mc.summary.unstable_indices.empty()) {
    os << "unstable runs:";
    for (int i : mc.summary.unstable_indices)
      os << " " << i;
    os << "\n";
  }
  os << "  metric                    mean        stdev          min          max\n";
  stat_row(os, "rmse_x", mc.summary.rmse_x, "m");
  stat_row(os, "rmse_z", mc.summary.rmse_z, "m");
  stat_row(os, "rmse_theta", mc.summary.rmse_theta_deg, "deg");
  stat_row(os, "rms_thrust", mc.summary.rms_thrust, "N");
  stat_row(os, "rms_gimbal", mc.summary.rms_gimbal_deg, "deg");
  stat_row(os, "end_altitude", mc.summary.end_altitude, "m");
  stat_row(os, "end_vspeed", mc.summary.end_vspeed, "m/s");
  return os.str();
}

std::string metrics_report(const RunMetrics& m) {
  std::ostringstream os;
  char buf[200];
  os << (m.stable ? "flight completed\n" : "flight UNSTABLE: " + m.failure + "\n");
  std::snprintf(buf, sizeof buf,
                "  end: t = %.3f s, altitude = %.1f m, vspeed = %.2f m/s, downrange = %.1f m\n",
                m.end_time_s, m.end_altitude_m, m.end_vspeed_mps, m.end_downrange_m);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "  tracking rmse: x = %.4g m, z = %.4g m, theta = %.4g deg\n", m.rmse_x_m,
                m.rmse_z_m, m.rmse_theta_rad * kRad2Deg);
  os << buf;
  std::snprintf(buf, sizeof buf, "  actuation rms: thrust = %.4g N, gimbal = %.4g deg\n",
                m.rms_thrust_n, m.rms_gimbal_rad * kRad2Deg);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "  estimator rmse: fax = %.4g N (%.3g%%), tau = %.4g N m (%.3g%%), "
                "faz = %.4g N (%.3g%%)\n",
                m.est_rmse_fax_n, m.est_pct_fax, m.est_rmse_tau_nm, m.est_pct_tau,
                m.est_rmse_faz_n, m.est_pct_faz);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "  peaks: qbar = %.4g Pa, |alpha| = %.4g deg, |gimbal| = %.4g deg\n",
                m.max_qbar_pa, m.max_abs_alpha_rad * kRad2Deg, m.max_abs_gimbal_rad * kRad2Deg);
  os << buf;
  return os.str();
}

} // namespace tvcsim
