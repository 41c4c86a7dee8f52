#include "tvcsim/config.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "tvcsim/atmosphere.hpp"

namespace tvcsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

// Typed access over RawConfig with unknown-key detection.
class Reader {
 public:
  explicit Reader(const RawConfig& raw) : raw_(raw) {}

  bool has(const std::string& sec, const std::string& key) {
    const auto s = raw_.sections.find(sec);
    return s != raw_.sections.end() && s->second.count(key) > 0;
  }

  std::string str(const std::string& sec, const std::string& key, const std::string& def) {
    const RawConfig::Entry* e = find(sec, key);
    return e ? e->value : def;
  }

  double num(const std::string& sec, const std::string& key, double def) {
    const RawConfig::Entry* e = find(sec, key);
    if (!e)
      return def;
    try {
      std::size_t pos = 0;
      const double v = std::stod(e->value, &pos);
      if (pos != e->value.size())
        throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      fail("config line " + std::to_string(e->line) + ": " + sec + "." + key +
           " is not a number: '" + e->value + "'");
    }
  }

  std::uint64_t u64(const std::string& sec, const std::string& key, std::uint64_t def) {
    const RawConfig::Entry* e = find(sec, key);
    if (!e)
      return def;
    try {
      return std::stoull(e->value);
    } catch (const std::exception&) {
      fail("config line " + std::to_string(e->line) + ": " + sec + "." + key +
           " is not an unsigned integer: '" + e->value + "'");
    }
  }

  bool flag(const std::string& sec, const std::string& key, bool def) {
    const RawConfig::Entry* e = find(sec, key);
    if (!e)
      return def;
    if (e->value == "true" || e->value == "1" || e->value == "on")
      return true;
    if (e->value == "false" || e->value == "0" || e->value == "off")
      return false;
    fail("config line " + std::to_string(e->line) + ": " + sec + "." + key +
         " is not a boolean: '" + e->value + "'");
  }

  // Every entry must have been consumed by a getter.
  void finish() const {
    for (const auto& [sec, entries] : raw_.sections)
      for (const auto& [key, e] : entries)
        if (!used_.count(sec + "." + key))
          fail("config line " + std::to_string(e.line) + ": unknown key " + sec + "." + key);
  }

 private:
  const RawConfig::Entry* find(const std::string& sec, const std::string& key) {
    used_.insert(sec + "." + key);
    const auto s = raw_.sections.find(sec);
    if (s == raw_.sections.end())
      return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  const RawConfig& raw_;
  std::set<std::string> used_;
};

// Segment list syntax, semicolon separated:
//   const T0 T1 ACCEL ; cosine T0 T1 AMP PERIOD OFFSET
std::vector<AccelSegment> parse_segments(const std::string& text, const std::string& what) {
  std::vector<AccelSegment> out;
  std::istringstream list(text);
  std::string item;
  while (std::getline(list, item, ';')) {
    item = trim(item);
    if (item.empty())
      continue;
    std::istringstream ss(item);
    std::string kind;
    ss >> kind;
    AccelSegment seg{};
    if (kind == "const") {
      seg.kind = AccelSegment::Kind::Const;
      if (!(ss >> seg.t_start >> seg.t_end >> seg.value))
        fail(what + ": const segment needs 'const T0 T1 ACCEL' in '" + item + "'");
    } else if (kind == "cosine") {
      seg.kind = AccelSegment::Kind::Cosine;
      if (!(ss >> seg.t_start >> seg.t_end >> seg.amp >> seg.period_s >> seg.offset))
        fail(what + ": cosine segment needs 'cosine T0 T1 AMP PERIOD OFFSET' in '" + item + "'");
    } else {
      fail(what + ": unknown segment kind '" + kind + "'");
    }
    std::string rest;
    if (ss >> rest)
      fail(what + ": trailing token '" + rest + "' in '" + item + "'");
    out.push_back(seg);
  }
  if (out.empty())
    fail(what + ": no segments given");
  return out;
}

std::string format_segments(const std::vector<AccelSegment>& segments) {
  std::string out;
  char buf[160];
  for (const AccelSegment& s : segments) {
    if (!out.empty())
      out += " ; ";
    if (s.kind == AccelSegment::Kind::Const)
      std::snprintf(buf, sizeof buf, "const %.17g %.17g %.17g", s.t_start, s.t_end, s.value);
    else
      std::snprintf(buf, sizeof buf, "cosine %.17g %.17g %.17g %.17g %.17g", s.t_start, s.t_end,
                    s.amp, s.period_s, s.offset);
    out += buf;
  }
  return out;
}

void require(bool ok, const std::string& msg) {
  if (!ok)
    fail("config: " + msg);
}

void validate(const SimConfig& c) {
  const VehicleModel& v = c.vehicle;
  require(v.length_m > 0 && v.diameter_m > 0, "vehicle dimensions must be positive");
  require(v.dry_mass_kg > 0 && v.dry_inertia_kgm2 > 0, "dry mass and inertia must be positive");
  require(v.dry_xcm_m > 0 && v.dry_xcm_m < v.length_m, "dry CM must lie inside the vehicle");
  require(v.gimbal_station_m > 0 && v.gimbal_station_m <= v.length_m,
          "gimbal station must lie inside the vehicle");
  require(v.propellant_mass_kg >= 0, "propellant mass must be nonnegative");
  require(v.isp_vac_s > 0, "specific impulse must be positive");
  require(v.nozzle_exit_area_m2 >= 0, "nozzle exit area must be nonnegative");
  require(v.ox_fuel_ratio > 0, "mixture ratio must be positive");
  require(v.ref_area_m2 > 0, "reference area must be positive");
  for (const TankSpec* t : {&v.ox_tank, &v.fuel_tank}) {
    require(t->volume_m3 > 0 && t->density_kgpm3 > 0, "tank volume and density must be positive");
    const double area = 3.14159265358979323846 * 0.25 * v.diameter_m * v.diameter_m;
    const double half = 0.5 * t->volume_m3 / area;
    require(t->center_station_m - half >= 0 && t->center_station_m + half <= v.length_m,
            "tank must fit inside the vehicle");
  }
  const double tank_capacity =
      v.ox_tank.volume_m3 * v.ox_tank.density_kgpm3 / v.ox_mass_fraction();
  require(v.propellant_mass_kg <= tank_capacity * 1.02,
          "propellant load exceeds oxidizer tank capacity at the given mixture ratio");

  require(!c.aero.alpha_rad.empty(), "aero tables are empty");

  require(c.wind_profile.size() >= 2, "wind profile needs at least two points");
  require(c.gust.length_m > 0 && c.gust.ref_speed_mps > 0 && c.gust.sigma_mps >= 0,
          "gust parameters must be positive (sigma nonnegative)");

  const InnerGains& g = c.inner;
  require(g.k1x > 0 && g.k2x > 0 && g.k1t > 0 && g.k2t > 0, "inner gains must be positive");
  require(g.gamma_x > 0 && g.gamma_t > 0, "adaptation rates must be positive");
  require(g.singularity_margin_rad > 0 && g.singularity_margin_rad < 1.57,
          "singularity margin must lie in (0, 90) deg");

  require(c.lqr_r > 0, "outer R must be positive");
  require(c.lqr_q.minCoeff() >= 0 && c.lqr_q.maxCoeff() > 0,
          "outer Q must be nonnegative and nonzero");
  require(c.thetadot_cutoff_hz > 0 && c.thetaddot_cutoff_hz > 0 && c.estimate_cutoff_hz > 0,
          "derivative filter cutoffs must be positive");
  require(c.sm_min > 0, "sm_min must be positive");

  require(c.dt > 0, "physics step must be positive");
  require(c.control_rate_hz > 0, "control rate must be positive");
  const double cycles = 1.0 / (c.control_rate_hz * c.dt);
  require(std::abs(cycles - std::round(cycles)) < 1e-9 && cycles >= 1.0 - 1e-9,
          "controller period must be an integer multiple of the physics step");
  require(c.t_max > 0, "t_max must be positive");
  require(c.profile.t_f > 0, "profile t_f must be positive");

  require(c.mc.runs >= 1, "mc runs must be >= 1");
  for (double s3 : {c.mc.sigma3_mass, c.mc.sigma3_inertia, c.mc.sigma3_xcm, c.mc.sigma3_xcp,
                    c.mc.sigma3_cd, c.mc.sigma3_cl})
    require(s3 >= 0 && s3 < 1.0, "mc 3-sigma values must lie in [0, 1)");

  // Tiling and ordering checks for the profile and wind table.
  integrate_profile(c.profile.x_segments, c.profile.t_f);
  if (!c.profile.z_segments.empty())
    integrate_profile(c.profile.z_segments, c.profile.t_f);
  for (std::size_t i = 1; i < c.wind_profile.size(); ++i)
    require(c.wind_profile[i].altitude_m > c.wind_profile[i - 1].altitude_m,
            "wind profile altitudes must ascend");
}

} // namespace

int SimConfig::steps_per_control_cycle() const {
  return static_cast<int>(std::round(1.0 / (control_rate_hz * dt)));
}

RawConfig parse_ini(const std::string& text, const std::string& origin) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';')
      continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3)
        fail(origin + ":" + std::to_string(lineno) + ": malformed section header '" + t + "'");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      fail(origin + ":" + std::to_string(lineno) + ": expected 'key = value', got '" + t + "'");
    if (section.empty())
      fail(origin + ":" + std::to_string(lineno) + ": key outside any [section]");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      fail(origin + ":" + std::to_string(lineno) + ": empty key");
    raw.sections[section][key] = {value, lineno};
  }
  return raw;
}

void apply_override(RawConfig& raw, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    fail("--set needs section.key=value, got '" + assignment + "'");
  const std::string path = trim(assignment.substr(0, eq));
  const auto dot = path.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == path.size())
    fail("--set needs section.key=value, got '" + assignment + "'");
  raw.sections[path.substr(0, dot)][path.substr(dot + 1)] = {trim(assignment.substr(eq + 1)), 0};
}

SimConfig build_config(const RawConfig& raw) {
  Reader r(raw);
  SimConfig c;

  VehicleModel& v = c.vehicle;
  v.length_m = r.num("vehicle", "length_m", v.length_m);
  v.diameter_m = r.num("vehicle", "diameter_m", v.diameter_m);
  v.dry_mass_kg = r.num("vehicle", "dry_mass_kg", v.dry_mass_kg);
  v.dry_inertia_kgm2 = r.num("vehicle", "dry_inertia_kgm2", v.dry_inertia_kgm2);
  v.dry_xcm_m = r.num("vehicle", "dry_xcm_m", v.dry_xcm_m);
  v.gimbal_station_m = r.num("vehicle", "gimbal_station_m", v.gimbal_station_m);
  v.ref_area_m2 = r.has("vehicle", "ref_area_m2")
                      ? r.num("vehicle", "ref_area_m2", 0.0)
                      : 3.14159265358979323846 * 0.25 * v.diameter_m * v.diameter_m;

  v.propellant_mass_kg = r.num("propulsion", "propellant_mass_kg", v.propellant_mass_kg);
  v.isp_vac_s = r.num("propulsion", "isp_vac_s", v.isp_vac_s);
  v.ox_fuel_ratio = r.num("propulsion", "ox_fuel_ratio", v.ox_fuel_ratio);
  v.nozzle_exit_area_m2 = r.num("propulsion", "nozzle_exit_area_m2", v.nozzle_exit_area_m2);
  v.ox_tank.density_kgpm3 = r.num("propulsion", "ox_density_kgpm3", v.ox_tank.density_kgpm3);
  v.ox_tank.volume_m3 = r.num("propulsion", "ox_tank_volume_m3", v.ox_tank.volume_m3);
  v.ox_tank.center_station_m = r.num("propulsion", "ox_tank_center_m", v.ox_tank.center_station_m);
  v.fuel_tank.density_kgpm3 = r.num("propulsion", "fuel_density_kgpm3", v.fuel_tank.density_kgpm3);
  v.fuel_tank.volume_m3 = r.num("propulsion", "fuel_tank_volume_m3", v.fuel_tank.volume_m3);
  v.fuel_tank.center_station_m =
      r.num("propulsion", "fuel_tank_center_m", v.fuel_tank.center_station_m);

  c.aero_enabled = r.flag("aero", "enabled", true);
  c.aero_source = r.str("aero", "table_csv", "builtin");
  c.aero = c.aero_source == "builtin" ? default_aero_tables() : load_aero_tables_csv(c.aero_source);

  c.wind_source = r.str("wind", "profile_csv", "builtin");
  c.wind_profile =
      c.wind_source == "builtin" ? default_wind_profile() : load_wind_profile_csv(c.wind_source);
  c.gust.enabled = r.flag("wind", "gusts_enabled", false);
  c.gust.sigma_mps = r.num("wind", "gust_sigma_mps", 1.0);
  c.gust.length_m = r.num("wind", "gust_length_m", 200.0);
  c.gust.ref_speed_mps = r.num("wind", "gust_ref_speed_mps", 170.0);
  c.gust.seed = r.u64("wind", "seed", 42);

  InnerGains& g = c.inner;
  g.k1x = r.num("inner", "k1x", g.k1x);
  g.k2x = r.num("inner", "k2x", g.k2x);
  g.k1t = r.num("inner", "k1theta", g.k1t);
  g.k2t = r.num("inner", "k2theta", g.k2t);
  g.gamma_x = r.num("inner", "gamma_x", g.gamma_x);
  g.gamma_t = r.num("inner", "gamma_theta", g.gamma_t);
  g.singularity_margin_rad = r.num("inner", "singularity_margin_deg", 5.0) * kDeg2Rad;

  c.actuator.enabled = r.flag("inner", "actuator_enabled", false);
  c.actuator.thrust_min_n = r.num("inner", "thrust_min_n", 0.0);
  c.actuator.thrust_max_n = r.num("inner", "thrust_max_n", 1e9);
  c.actuator.gimbal_max_rad = r.num("inner", "gimbal_max_deg", 28.6) * kDeg2Rad;
  c.actuator.thrust_rate_nps = r.num("inner", "thrust_rate_nps", 1e12);
  c.actuator.gimbal_rate_radps = r.num("inner", "gimbal_rate_degps", 5.7e7) * kDeg2Rad;

  c.lqr_q[0] = r.num("outer", "q_ez", c.lqr_q[0]);
  c.lqr_q[1] = r.num("outer", "q_ezdot", c.lqr_q[1]);
  c.lqr_q[2] = r.num("outer", "q_zeta", c.lqr_q[2]);
  c.lqr_r = r.num("outer", "r", c.lqr_r);
  c.thetadot_cutoff_hz = r.num("outer", "thetadot_cutoff_hz", c.thetadot_cutoff_hz);
  c.thetaddot_cutoff_hz = r.num("outer", "thetaddot_cutoff_hz", c.thetaddot_cutoff_hz);
  c.estimate_cutoff_hz = r.num("outer", "estimate_cutoff_hz", c.estimate_cutoff_hz);
  c.sm_min = r.num("outer", "sm_min", c.sm_min);

  c.scenario = r.str("mission", "scenario", "vertical");
  const double t_f = r.num("mission", "t_f_s", 103.0);
  if (c.scenario == "vertical") {
    c.profile = scenario_vertical_ascent(t_f);
  } else if (c.scenario == "dogleg") {
    c.profile = scenario_dogleg(t_f);
  } else if (c.scenario == "custom") {
    c.profile.t_f = t_f;
    c.profile.x_segments =
        parse_segments(r.str("mission", "accel_x", ""), "config mission.accel_x");
    const std::string az = r.str("mission", "accel_z", "");
    if (!trim(az).empty())
      c.profile.z_segments = parse_segments(az, "config mission.accel_z");
  } else {
    fail("config: mission.scenario must be vertical, dogleg, or custom (got '" + c.scenario +
         "')");
  }
  // Consume the custom keys even for builtin scenarios so finish() stays strict
  // only about truly unknown keys.
  if (c.scenario != "custom") {
    if (r.has("mission", "accel_x") || r.has("mission", "accel_z"))
      fail("config: mission.accel_x/accel_z are only valid with scenario = custom");
  }

  c.dt = r.num("sim", "dt_s", c.dt);
  c.control_rate_hz = r.num("sim", "control_rate_hz", c.control_rate_hz);
  c.t_max = r.num("sim", "t_max_s", c.t_max);
  c.freeze_mass = r.flag("sim", "freeze_mass", false);

  c.mc.runs = static_cast<int>(r.num("mc", "runs", c.mc.runs));
  c.mc.seed = r.u64("mc", "seed", c.mc.seed);
  c.mc.sigma3_mass = r.num("mc", "sigma3_mass", c.mc.sigma3_mass);
  c.mc.sigma3_inertia = r.num("mc", "sigma3_inertia", c.mc.sigma3_inertia);
  c.mc.sigma3_xcm = r.num("mc", "sigma3_xcm", c.mc.sigma3_xcm);
  c.mc.sigma3_xcp = r.num("mc", "sigma3_xcp", c.mc.sigma3_xcp);
  c.mc.sigma3_cd = r.num("mc", "sigma3_cd", c.mc.sigma3_cd);
  c.mc.sigma3_cl = r.num("mc", "sigma3_cl", c.mc.sigma3_cl);

  r.finish();
  validate(c);
  return c;
}

std::string manifest(const SimConfig& c) {
  std::ostringstream out;
  char buf[64];
  auto num = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << key << " = " << buf << "\n";
  };
  auto str = [&](const char* key, const std::string& v) { out << key << " = " << v << "\n"; };
  auto flag = [&](const char* key, bool v) { out << key << " = " << (v ? "true" : "false") << "\n"; };

  const VehicleModel& v = c.vehicle;
  out << "[vehicle]\n";
  num("length_m", v.length_m);
  num("diameter_m", v.diameter_m);
  num("dry_mass_kg", v.dry_mass_kg);
  num("dry_inertia_kgm2", v.dry_inertia_kgm2);
  num("dry_xcm_m", v.dry_xcm_m);
  num("gimbal_station_m", v.gimbal_station_m);
  num("ref_area_m2", v.ref_area_m2);

  out << "\n[propulsion]\n";
  num("propellant_mass_kg", v.propellant_mass_kg);
  num("isp_vac_s", v.isp_vac_s);
  num("ox_fuel_ratio", v.ox_fuel_ratio);
  num("nozzle_exit_area_m2", v.nozzle_exit_area_m2);
  num("ox_density_kgpm3", v.ox_tank.density_kgpm3);
  num("ox_tank_volume_m3", v.ox_tank.volume_m3);
  num("ox_tank_center_m", v.ox_tank.center_station_m);
  num("fuel_density_kgpm3", v.fuel_tank.density_kgpm3);
  num("fuel_tank_volume_m3", v.fuel_tank.volume_m3);
  num("fuel_tank_center_m", v.fuel_tank.center_station_m);

  out << "\n[aero]\n";
  flag("enabled", c.aero_enabled);
  str("table_csv", c.aero_source);

  out << "\n[wind]\n";
  str("profile_csv", c.wind_source);
  flag("gusts_enabled", c.gust.enabled);
  num("gust_sigma_mps", c.gust.sigma_mps);
  num("gust_length_m", c.gust.length_m);
  num("gust_ref_speed_mps", c.gust.ref_speed_mps);
  out << "seed = " << c.gust.seed << "\n";

  out << "\n[inner]\n";
  num("k1x", c.inner.k1x);
  num("k2x", c.inner.k2x);
  num("k1theta", c.inner.k1t);
  num("k2theta", c.inner.k2t);
  num("gamma_x", c.inner.gamma_x);
  num("gamma_theta", c.inner.gamma_t);
  num("singularity_margin_deg", c.inner.singularity_margin_rad * kRad2Deg);
  flag("actuator_enabled", c.actuator.enabled);
  num("thrust_min_n", c.actuator.thrust_min_n);
  num("thrust_max_n", c.actuator.thrust_max_n);
  num("gimbal_max_deg", c.actuator.gimbal_max_rad * kRad2Deg);
  num("thrust_rate_nps", c.actuator.thrust_rate_nps);
  num("gimbal_rate_degps", c.actuator.gimbal_rate_radps * kRad2Deg);

  out << "\n[outer]\n";
  num("q_ez", c.lqr_q[0]);
  num("q_ezdot", c.lqr_q[1]);
  num("q_zeta", c.lqr_q[2]);
  num("r", c.lqr_r);
  num("thetadot_cutoff_hz", c.thetadot_cutoff_hz);
  num("thetaddot_cutoff_hz", c.thetaddot_cutoff_hz);
  num("estimate_cutoff_hz", c.estimate_cutoff_hz);
  num("sm_min", c.sm_min);

  out << "\n[mission]\n";
  str("scenario", c.scenario);
  num("t_f_s", c.profile.t_f);
  if (c.scenario == "custom") {
    str("accel_x", format_segments(c.profile.x_segments));
    if (!c.profile.z_segments.empty())
      str("accel_z", format_segments(c.profile.z_segments));
  }

  out << "\n[sim]\n";
  num("dt_s", c.dt);
  num("control_rate_hz", c.control_rate_hz);
  num("t_max_s", c.t_max);
  flag("freeze_mass", c.freeze_mass);

  out << "\n[mc]\n";
  out << "runs = " << c.mc.runs << "\n";
  out << "seed = " << c.mc.seed << "\n";
  num("sigma3_mass", c.mc.sigma3_mass);
  num("sigma3_inertia", c.mc.sigma3_inertia);
  num("sigma3_xcm", c.mc.sigma3_xcm);
  num("sigma3_xcp", c.mc.sigma3_xcp);
  num("sigma3_cd", c.mc.sigma3_cd);
  num("sigma3_cl", c.mc.sigma3_cl);
  return out.str();
}

} // namespace tvcsim
