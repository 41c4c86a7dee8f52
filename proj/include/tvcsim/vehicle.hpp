#pragma once

namespace tvcsim {

// Propellant tank: a vehicle-diameter cylinder holding one propellant.
struct TankSpec {
  double volume_m3;        // tank volume [m^3]
  double center_station_m; // tank center, measured from the nose [m]
  double density_kgpm3;    // propellant density [kg/m^3]
};

// Static vehicle description. Stations are measured from the nose, +aft.
struct VehicleModel {
  double length_m = 8.0;           // overall length [m]
  double diameter_m = 0.5;         // max body diameter [m]
  double dry_mass_kg = 600.0;      // burnout mass [kg]
  double dry_inertia_kgm2 = 3100.0; // pitch inertia about the dry CM [kg m^2]
  double dry_xcm_m = 4.18;         // dry CM station [m]
  double gimbal_station_m = 8.0;   // thrust application point [m]
  double propellant_mass_kg = 650.0; // total propellant at liftoff [kg]
  double isp_vac_s = 300.0;        // vacuum specific impulse [s]
  double nozzle_exit_area_m2 = 0.02; // nozzle exit area [m^2]
  double ox_fuel_ratio = 2.5;      // oxidizer-to-fuel mass ratio
  TankSpec ox_tank{0.41, 4.0, 1141.0};
  TankSpec fuel_tank{0.23, 5.8, 800.0};
  double ref_area_m2 = 0.19634954084936207; // aero reference area, pi d^2/4 [m^2]

  double ox_mass_fraction() const { return ox_fuel_ratio / (1.0 + ox_fuel_ratio); }
};

// Mass properties at one instant. l is the gimbal-to-CM moment arm.
struct MassState {
  double m;             // total mass [kg]
  double j_y;           // pitch inertia about the current CM [kg m^2]
  double x_cm;          // CM station from the nose [m]
  double l;             // gimbal_station - x_cm [m]
  double propellant_kg; // remaining propellant [kg]
};

// Propellant mass flow [kg/s], negative while the engine burns.
// Vacuum-thrust model with ambient back-pressure loss through the exit area.
double mass_flow_rate(double thrust_n, double ambient_pressure_pa, const VehicleModel& vm);

// Mass properties for a given remaining propellant load. Each tank's
// propellant is spread uniformly over the full tank length, so the
// composite CM and inertia follow from parallel-axis composition.
MassState evaluate_mass_state(const VehicleModel& vm, double propellant_kg);

// Explicit Euler propellant update using the step-start flow rate,
// clamped at depletion.
MassState update_mass_state(const MassState& ms, const VehicleModel& vm, double mdot, double dt);

} // namespace tvcsim
