#pragma once

#include <string>
#include <vector>

namespace tvcsim {

struct AeroCoeffs {
  double c_l;    // lift coefficient
  double c_d;    // drag coefficient
  double x_cp_m; // center of pressure station from the nose [m]
};

// Dense (alpha, Mach) grid with bilinear interpolation, clamped at the
// grid edges so the lookup is defined (and continuous) for all inputs.
struct AeroTables {
  std::vector<double> alpha_rad; // ascending breakpoints [rad]
  std::vector<double> mach;      // ascending breakpoints
  std::vector<AeroCoeffs> data;  // row-major: [alpha index][mach index]

  const AeroCoeffs& at(std::size_t ia, std::size_t im) const {
    return data[ia * mach.size() + im];
  }
};

AeroCoeffs aero_coefficients(double alpha_rad, double mach, const AeroTables& tables);

// Synthetic slender-body defaults: c_l = 2 alpha, c_d = (0.3 + 1.5 alpha^2)
// with a transonic bump, x_cp ahead of the CM range (statically unstable).
AeroTables default_aero_tables();

// Loads "alpha_deg, mach, cl, cd, xcp_m" CSV rows forming a dense grid,
// alpha in the outer loop. Header row required.
AeroTables load_aero_tables_csv(const std::string& path);

} // namespace tvcsim
