#include "tvcsim/wind.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tvcsim/rng.hpp"

namespace tvcsim {

std::vector<WindProfilePoint> default_wind_profile() {
  return {
      {0.0, 4.0},     {1000.0, 7.0},   {3000.0, 11.0},  {6000.0, 16.0},
      {10000.0, 20.0}, {14000.0, 15.0}, {20000.0, 8.0},  {30000.0, 4.0},
      {50000.0, 1.0},  {100000.0, 0.0},
  };
}

std::vector<WindProfilePoint> load_wind_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("wind profile: cannot open " + path);

  std::vector<WindProfilePoint> profile;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.front() == '#')
      continue;
    std::istringstream row(line);
    std::string a, w;
    if (!std::getline(row, a, ',') || !std::getline(row, w)) {
      throw std::runtime_error("wind profile: bad row at " + path + ":" + std::to_string(lineno));
    }
    try {
      profile.push_back({std::stod(a), std::stod(w)});
    } catch (const std::exception&) {
      if (lineno == 1)
        continue; // header row
      throw std::runtime_error("wind profile: non-numeric row at " + path + ":" +
                               std::to_string(lineno));
    }
  }
  if (profile.size() < 2)
    throw std::runtime_error("wind profile: need at least two rows in " + path);
  for (std::size_t i = 1; i < profile.size(); ++i) {
    if (profile[i].altitude_m <= profile[i - 1].altitude_m)
      throw std::runtime_error("wind profile: altitudes must ascend in " + path);
  }
  return profile;
}

WindModel::WindModel(std::vector<WindProfilePoint> profile, const GustParams& gust, double dt)
    : profile_(std::move(profile)), gust_(gust), rng_(gust.seed) {
  if (profile_.size() < 2)
    throw std::invalid_argument("WindModel: profile needs at least two points");
  if (gust_.enabled) {
    if (gust_.length_m <= 0.0 || gust_.ref_speed_mps <= 0.0 || gust_.sigma_mps < 0.0 || dt <= 0.0)
      throw std::invalid_argument("WindModel: bad gust parameters");
    const double tau = gust_.length_m / gust_.ref_speed_mps;
    a_ = std::exp(-dt / tau);
    b_ = gust_.sigma_mps * std::sqrt(1.0 - a_ * a_);
  }
}

void WindModel::advance() {
  if (!gust_.enabled)
    return;
  gust_state_[0] = a_ * gust_state_[0] + b_ * normal_variate(rng_);
  gust_state_[1] = a_ * gust_state_[1] + b_ * normal_variate(rng_);
}

double WindModel::mean_wind_z(double altitude_m) const {
  if (altitude_m <= profile_.front().altitude_m)
    return profile_.front().wind_z_mps;
  if (altitude_m >= profile_.back().altitude_m)
    return profile_.back().wind_z_mps;
  std::size_t i = 1;
  while (profile_[i].altitude_m < altitude_m)
    ++i;
  const WindProfilePoint& lo = profile_[i - 1];
  const WindProfilePoint& hi = profile_[i];
  const double s = (altitude_m - lo.altitude_m) / (hi.altitude_m - lo.altitude_m);
  return lo.wind_z_mps + s * (hi.wind_z_mps - lo.wind_z_mps);
}

Eigen::Vector2d WindModel::sample(double altitude_m) const {
  return {gust_state_[0], mean_wind_z(altitude_m) + gust_state_[1]};
}

} // namespace tvcsim
