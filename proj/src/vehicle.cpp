#include "tvcsim/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tvcsim/atmosphere.hpp"

namespace tvcsim {

double mass_flow_rate(double thrust_n, double ambient_pressure_pa, const VehicleModel& vm) {
  if (thrust_n < 0.0)
    throw std::invalid_argument("mass_flow_rate: negative thrust");
  if (ambient_pressure_pa < 0.0)
    throw std::invalid_argument("mass_flow_rate: negative ambient pressure");
  const double c = vm.isp_vac_s * kG0; // effective exhaust velocity [m/s]
  return -(thrust_n + ambient_pressure_pa * vm.nozzle_exit_area_m2) / c;
}

namespace {

struct TankState {
  double mass;    // propellant mass in the tank [kg]
  double station; // tank center station [m]
  double length;  // tank length [m]
};

TankState tank_state(const TankSpec& tank, double mass, double body_radius) {
  const double area = 3.14159265358979323846 * body_radius * body_radius;
  return {mass, tank.center_station_m, tank.volume_m3 / area};
}

} // namespace

MassState evaluate_mass_state(const VehicleModel& vm, double propellant_kg) {
  propellant_kg = std::clamp(propellant_kg, 0.0, vm.propellant_mass_kg);

  const double r = 0.5 * vm.diameter_m;
  const double frac_ox = vm.ox_mass_fraction();
  const TankState ox = tank_state(vm.ox_tank, frac_ox * propellant_kg, r);
  const TankState fu = tank_state(vm.fuel_tank, (1.0 - frac_ox) * propellant_kg, r);

  const double m = vm.dry_mass_kg + propellant_kg;
  const double x_cm =
      (vm.dry_mass_kg * vm.dry_xcm_m + ox.mass * ox.station + fu.mass * fu.station) / m;

  // Parallel-axis composition about the instantaneous CM. Propellant in each
  // tank is a uniform solid cylinder: I_cm = m (3 r^2 + L^2) / 12.
  double j = vm.dry_inertia_kgm2 + vm.dry_mass_kg * (vm.dry_xcm_m - x_cm) * (vm.dry_xcm_m - x_cm);
  for (const TankState& t : {ox, fu}) {
    j += t.mass * (3.0 * r * r + t.length * t.length) / 12.0;
    j += t.mass * (t.station - x_cm) * (t.station - x_cm);
  }

  return {m, j, x_cm, vm.gimbal_station_m - x_cm, propellant_kg};
}

MassState update_mass_state(const MassState& ms, const VehicleModel& vm, double mdot, double dt) {
  const double prop = std::max(0.0, ms.propellant_kg + mdot * dt);
  return evaluate_mass_state(vm, prop);
}

} // namespace tvcsim
