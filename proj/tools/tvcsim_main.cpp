#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tvcsim/atmosphere.hpp"
#include "tvcsim/config.hpp"
#include "tvcsim/sim.hpp"
#include "tvcsim/svg_plot.hpp"

namespace {

namespace fs = std::filesystem;
using namespace tvcsim;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitUnstable = 3;
constexpr int kExitNumeric = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  bool no_plots = false;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config_path, "configuration file (INI)");
  cmd->add_option("--out", a.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--set", a.overrides, "override, repeatable: section.key=value");
  cmd->add_option("--seed", a.seed, "seed override (wind gusts for run, campaign for mc)");
  cmd->add_flag("--no-plots", a.no_plots, "skip SVG plot generation");
}

SimConfig load_config(const CommonArgs& a) {
  RawConfig raw;
  if (!a.config_path.empty()) {
    std::ifstream in(a.config_path);
    if (!in)
      throw ConfigError("cannot open config file: " + a.config_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    raw = parse_ini(ss.str(), a.config_path);
  }
  for (const std::string& ov : a.overrides)
    apply_override(raw, ov);
  return build_config(raw);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out)
    throw std::runtime_error("write failed: " + path.string());
}

std::vector<std::pair<double, double>> col(const FlightLog& log, double FlightLogRow::*f,
                                           double scale = 1.0) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(log.rows.size());
  for (const FlightLogRow& r : log.rows)
    pts.push_back({r.t, r.*f * scale});
  return pts;
}

void write_plots(const fs::path& dir, const FlightLog& log) {
  write_text(dir / "trajectory.svg",
             render_plot_svg(
                 "trajectory", "time [s]",
                 {{"altitude", "x [m]",
                   {{"actual", "", col(log, &FlightLogRow::x)},
                    {"reference", "", col(log, &FlightLogRow::x_d)}}},
                  {"downrange", "z [m]",
                   {{"actual", "", col(log, &FlightLogRow::z)},
                    {"reference", "", col(log, &FlightLogRow::z_d)}}},
                  {"pitch", "theta [deg]",
                   {{"actual", "", col(log, &FlightLogRow::theta, kRad2Deg)},
                    {"reference", "", col(log, &FlightLogRow::theta_d, kRad2Deg)}}}}));
  write_text(dir / "errors.svg",
             render_plot_svg("tracking errors", "time [s]",
                             {{"altitude error", "e_x [m]",
                               {{"", "", col(log, &FlightLogRow::e_x)}}},
                              {"downrange error", "e_z [m]",
                               {{"", "", col(log, &FlightLogRow::e_z)}}},
                              {"pitch error", "e_theta [deg]",
                               {{"", "", col(log, &FlightLogRow::e_theta, kRad2Deg)}}}}));
  write_text(dir / "estimates.svg",
             render_plot_svg(
                 "disturbance estimates", "time [s]",
                 {{"axial aero force", "f_ax [N]",
                   {{"true", "", col(log, &FlightLogRow::fax_true)},
                    {"estimate", "", col(log, &FlightLogRow::fax_hat)}}},
                  {"aero pitch moment", "tau_a [N m]",
                   {{"true", "", col(log, &FlightLogRow::tau_true)},
                    {"estimate", "", col(log, &FlightLogRow::tau_hat)}}},
                  {"normal aero force", "f_az [N]",
                   {{"true", "", col(log, &FlightLogRow::faz_true)},
                    {"estimate", "", col(log, &FlightLogRow::faz_hat)}}}}));
  write_text(dir / "actuation.svg",
             render_plot_svg("actuation and flight condition", "time [s]",
                             {{"thrust", "T [N]",
                               {{"", "", col(log, &FlightLogRow::thrust_n)}}},
                              {"gimbal", "mu [deg]",
                               {{"", "", col(log, &FlightLogRow::gimbal_rad, kRad2Deg)}}},
                              {"dynamic pressure", "qbar [Pa]",
                               {{"", "", col(log, &FlightLogRow::qbar_pa)}}}}));
}

int cmd_run(const CommonArgs& a) {
  SimConfig cfg = load_config(a);
  if (a.seed)
    cfg.gust.seed = *a.seed;
  fs::create_directories(a.out_dir);
  write_text(fs::path(a.out_dir) / "manifest.ini", manifest(cfg));

  const FlightResult res = run_flight(cfg);
  {
    std::ofstream out(fs::path(a.out_dir) / "flight.csv", std::ios::binary);
    if (!out)
      throw std::runtime_error("cannot write flight.csv");
    write_flight_csv(out, res.log);
  }
  if (!a.no_plots)
    write_plots(a.out_dir, res.log);
  std::cout << metrics_report(res.metrics);
  return res.metrics.stable ? kExitOk : kExitUnstable;
}

int cmd_mc(const CommonArgs& a) {
  SimConfig cfg = load_config(a);
  if (a.seed)
    cfg.mc.seed = *a.seed;
  fs::create_directories(a.out_dir);
  write_text(fs::path(a.out_dir) / "manifest.ini", manifest(cfg));

  const McResult mc = run_monte_carlo(cfg);
  {
    std::ofstream out(fs::path(a.out_dir) / "mc.csv", std::ios::binary);
    if (!out)
      throw std::runtime_error("cannot write mc.csv");
    write_mc_csv(out, mc);
  }
  std::cout << mc_table(mc);
  return mc.summary.stable_runs == mc.summary.runs ? kExitOk : kExitUnstable;
}

int cmd_gains(const CommonArgs& a) {
  const SimConfig cfg = load_config(a);
  const OuterGains k = lqr_design(cfg.lqr_q, cfg.lqr_r);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "lqr gains for Q = diag(%g, %g, %g), R = %g:\n"
                "  k_z = %.6f\n  k_zdot = %.6f\n  k_i = %.6f\n",
                cfg.lqr_q[0], cfg.lqr_q[1], cfg.lqr_q[2], cfg.lqr_r, k.k_z, k.k_zdot, k.k_i);
  std::cout << buf;
  return kExitOk;
}

int cmd_reference(const CommonArgs& a) {
  const SimConfig cfg = load_config(a);
  fs::create_directories(a.out_dir);
  std::ostringstream os;
  os << "t,x_d,xdot_d,xddot_d,z_d,zdot_d,zddot_d,coast\n";
  const double dt = 1.0 / cfg.control_rate_hz;
  const long n = static_cast<long>(cfg.t_max / dt) + 1;
  std::vector<std::pair<double, double>> px, pvx, pz, pvz;
  char buf[320];
  for (long i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    const ReferenceSample r = sample_reference(cfg.profile, t);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", t, r.x_d,
                  r.xdot_d, r.xddot_d, r.z_d, r.zdot_d, r.zddot_d, r.coast ? 1 : 0);
    os << buf;
    px.push_back({t, r.x_d});
    pvx.push_back({t, r.xdot_d});
    pz.push_back({t, r.z_d});
    pvz.push_back({t, r.zdot_d});
  }
  write_text(fs::path(a.out_dir) / "reference.csv", os.str());
  if (!a.no_plots)
    write_text(fs::path(a.out_dir) / "reference.svg",
               render_plot_svg("reference trajectory", "time [s]",
                               {{"altitude", "x_d [m]", {{"", "", px}}},
                                {"vertical speed", "xdot_d [m/s]", {{"", "", pvx}}},
                                {"downrange", "z_d [m]", {{"", "", pz}}},
                                {"downrange speed", "zdot_d [m/s]", {{"", "", pvz}}}}));
  std::cout << "reference written to " << a.out_dir << "\n";
  return kExitOk;
}

int cmd_validate(const CommonArgs& a) {
  const SimConfig cfg = load_config(a);
  std::cout << "config ok\n" << manifest(cfg);
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"pitch-plane sounding rocket flight simulator with adaptive "
               "feedback-linearization TVC control"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* c_run = app.add_subcommand("run", "simulate one flight");
  CLI::App* c_mc = app.add_subcommand("mc", "run a dispersed Monte Carlo campaign");
  CLI::App* c_gains = app.add_subcommand("gains", "print the outer-loop LQR gains");
  CLI::App* c_ref = app.add_subcommand("reference", "dump the reference trajectory");
  CLI::App* c_val = app.add_subcommand("validate", "check a configuration and print it");
  for (CLI::App* c : {c_run, c_mc, c_gains, c_ref, c_val})
    add_common(c, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (c_run->parsed())
      return cmd_run(args);
    if (c_mc->parsed())
      return cmd_mc(args);
    if (c_gains->parsed())
      return cmd_gains(args);
    if (c_ref->parsed())
      return cmd_reference(args);
    if (c_val->parsed())
      return cmd_validate(args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}
