#include "tvcsim/atmosphere.hpp"

#include <cmath>
#include <stdexcept>

namespace tvcsim {

namespace {

// Layer bases in geopotential kilometres with published base temperatures
// and pressure ratios. Lapse rates in K per geopotential km.
constexpr int kLayers = 8;
constexpr double kHBase[kLayers] = {0.0, 11.0, 20.0, 32.0, 47.0, 51.0, 71.0, 84.852};
constexpr double kTBase[kLayers] = {288.15, 216.65, 216.65, 228.65, 270.65, 270.65, 214.65, 186.946};
constexpr double kPBase[kLayers] = {1.0,          2.2336110e-1, 5.4032950e-2, 8.5666784e-3,
                                    1.0945601e-3, 6.6063531e-4, 3.9046834e-5, 3.68501e-6};
constexpr double kLapse[kLayers] = {-6.5, 0.0, 1.0, 2.8, 0.0, -2.8, -2.0, 0.0};
constexpr double kGMR = 34.163195; // g0 * M / R* [K/km]
constexpr double kP0 = 101325.0;   // sea-level pressure [Pa]

} // namespace

AtmoSample sample_atmosphere(double altitude_m) {
  if (altitude_m < -100.0)
    throw std::out_of_range("sample_atmosphere: altitude below model floor (-100 m)");
  if (altitude_m > 100000.0)
    altitude_m = 100000.0;

  const double h = altitude_m / 1000.0; // geopotential km
  int i = 0;
  while (i + 1 < kLayers && h >= kHBase[i + 1])
    ++i;

  const double dh = h - kHBase[i];
  double t, p;
  if (kLapse[i] == 0.0) {
    t = kTBase[i];
    p = kP0 * kPBase[i] * std::exp(-kGMR * dh / kTBase[i]);
  } else {
    t = kTBase[i] + kLapse[i] * dh;
    p = kP0 * kPBase[i] * std::pow(kTBase[i] / t, kGMR / kLapse[i]);
  }

  const double rho = p / (kGasConstantAir * t);
  const double a = std::sqrt(kGammaAir * kGasConstantAir * t);
  return {p, rho, a};
}

double gravity(double altitude_m) {
  const double r = kEarthRadius / (kEarthRadius + altitude_m);
  return kG0 * r * r;
}

} // namespace tvcsim
