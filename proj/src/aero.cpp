#include "tvcsim/aero.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tvcsim/atmosphere.hpp"

namespace tvcsim {

namespace {

// Index of the interval containing v, clamped to the table span.
// Returns (i, s) with v ~ grid[i] + s * (grid[i+1] - grid[i]), s in [0, 1].
std::pair<std::size_t, double> bracket(const std::vector<double>& grid, double v) {
  if (v <= grid.front())
    return {0, 0.0};
  if (v >= grid.back())
    return {grid.size() - 2, 1.0};
  std::size_t i = 1;
  while (grid[i] < v)
    ++i;
  return {i - 1, (v - grid[i - 1]) / (grid[i] - grid[i - 1])};
}

} // namespace

AeroCoeffs aero_coefficients(double alpha_rad, double mach, const AeroTables& tables) {
  if (!std::isfinite(alpha_rad) || !std::isfinite(mach))
    throw std::invalid_argument("aero_coefficients: non-finite input");

  const auto [ia, sa] = bracket(tables.alpha_rad, alpha_rad);
  const auto [im, sm] = bracket(tables.mach, mach);

  auto lerp = [](double a, double b, double s) { return a + s * (b - a); };
  auto blend = [&](auto field) {
    const double lo = lerp(tables.at(ia, im).*field, tables.at(ia, im + 1).*field, sm);
    const double hi = lerp(tables.at(ia + 1, im).*field, tables.at(ia + 1, im + 1).*field, sm);
    return lerp(lo, hi, sa);
  };

  return {blend(&AeroCoeffs::c_l), blend(&AeroCoeffs::c_d), blend(&AeroCoeffs::x_cp_m)};
}

AeroTables default_aero_tables() {
  AeroTables t;
  for (int a = -30; a <= 30; a += 5)
    t.alpha_rad.push_back(a * kDeg2Rad);
  t.mach = {0.0, 0.4, 0.8, 0.9, 0.95, 1.0, 1.05, 1.1, 1.2, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0};

  t.data.reserve(t.alpha_rad.size() * t.mach.size());
  for (double alpha : t.alpha_rad) {
    for (double m : t.mach) {
      const double bump = 1.0 + 0.8 * std::exp(-std::pow((m - 1.05) / 0.30, 2));
      const double c_l = 2.0 * alpha;
      const double c_d = (0.30 + 1.5 * alpha * alpha) * bump;
      const double x_cp = 3.1 + 0.075 * std::min(m, 2.0);
      t.data.push_back({c_l, c_d, x_cp});
    }
  }
  return t;
}

AeroTables load_aero_tables_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("aero tables: cannot open " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("aero tables: empty file " + path);

  struct Row {
    double alpha_rad, mach;
    AeroCoeffs c;
  };
  std::vector<Row> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.front() == '#')
      continue;
    std::istringstream ss(line);
    std::string cell;
    double v[5];
    for (int i = 0; i < 5; ++i) {
      if (!std::getline(ss, cell, i < 4 ? ',' : '\n'))
        throw std::runtime_error("aero tables: short row at " + path + ":" +
                                 std::to_string(lineno));
      try {
        v[i] = std::stod(cell);
      } catch (const std::exception&) {
        throw std::runtime_error("aero tables: non-numeric cell at " + path + ":" +
                                 std::to_string(lineno));
      }
    }
    rows.push_back({v[0] * kDeg2Rad, v[1], {v[2], v[3], v[4]}});
  }
  if (rows.empty())
    throw std::runtime_error("aero tables: no data rows in " + path);

  AeroTables t;
  for (const Row& r : rows) {
    if (t.mach.empty() || r.mach > t.mach.back()) {
      if (t.alpha_rad.size() <= 1)
        t.mach.push_back(r.mach);
    }
    if (t.alpha_rad.empty() || r.alpha_rad > t.alpha_rad.back())
      t.alpha_rad.push_back(r.alpha_rad);
    t.data.push_back(r.c);
  }
  if (t.alpha_rad.size() < 2 || t.mach.size() < 2 ||
      t.data.size() != t.alpha_rad.size() * t.mach.size())
    throw std::runtime_error("aero tables: rows do not form a dense alpha-outer grid in " + path);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t ia = i / t.mach.size(), im = i % t.mach.size();
    if (std::abs(rows[i].alpha_rad - t.alpha_rad[ia]) > 1e-12 ||
        std::abs(rows[i].mach - t.mach[im]) > 1e-12)
      throw std::runtime_error("aero tables: breakpoints not row-major consistent in " + path);
  }
  return t;
}

} // namespace tvcsim
