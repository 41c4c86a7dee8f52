#pragma once

namespace tvcsim {

// Physical constants shared across the models.
constexpr double kG0 = 9.80665;           // standard gravity [m/s^2]
constexpr double kEarthRadius = 6371000.0; // mean Earth radius [m]
constexpr double kGasConstantAir = 287.053; // specific gas constant, dry air [J/(kg K)]
constexpr double kGammaAir = 1.4;          // ratio of specific heats, dry air

constexpr double kDeg2Rad = 0.017453292519943295;
constexpr double kRad2Deg = 57.29577951308232;

struct AtmoSample {
  double pressure_pa;        // static pressure [Pa]
  double density_kgpm3;      // density [kg/m^3]
  double speed_of_sound_mps; // speed of sound [m/s]
};

// US Standard Atmosphere 1976, geopotential layer table up to 84.852 km;
// above that the last isothermal layer's exponential decay continues.
// Valid for altitude in [-100 m, 100 km]; inputs above 100 km are clamped,
// inputs below -100 m throw std::out_of_range.
AtmoSample sample_atmosphere(double altitude_m);

// Inverse-square gravity, g0 at sea level.
double gravity(double altitude_m);

} // namespace tvcsim
