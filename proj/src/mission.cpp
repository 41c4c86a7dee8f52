#include "tvcsim/mission.hpp"

#include <cmath>
#include <stdexcept>

namespace tvcsim {

namespace {

constexpr double kTwoPi = 6.283185307179586;

double accel_at(const AccelSegment& s, double t) {
  if (s.kind == AccelSegment::Kind::Const)
    return s.value;
  return s.amp * std::cos(kTwoPi * t / s.period_s) + s.offset;
}

// Exact antiderivatives over [s.t_start, t].
void integrate_segment(const AccelSegment& s, double p0, double v0, double t, double& p,
                       double& v) {
  const double tau = t - s.t_start;
  if (s.kind == AccelSegment::Kind::Const) {
    v = v0 + s.value * tau;
    p = p0 + v0 * tau + 0.5 * s.value * tau * tau;
    return;
  }
  const double w = kTwoPi / s.period_s;
  const double s0 = std::sin(w * s.t_start), c0 = std::cos(w * s.t_start);
  v = v0 + (s.amp / w) * (std::sin(w * t) - s0) + s.offset * tau;
  p = p0 + v0 * tau + 0.5 * s.offset * tau * tau +
      (s.amp / w) * ((c0 - std::cos(w * t)) / w - s0 * tau);
}

struct AxisSample {
  double p, v, a;
};

AxisSample sample_axis(const std::vector<AccelSegment>& segments, double t_f, double t) {
  if (segments.empty())
    return {0.0, 0.0, 0.0};

  double p0 = 0.0, v0 = 0.0;
  for (const AccelSegment& s : segments) {
    if (t <= s.t_end || &s == &segments.back()) {
      const double te = std::min(t, s.t_end);
      double p, v;
      integrate_segment(s, p0, v0, te, p, v);
      if (t <= s.t_end)
        return {p, v, accel_at(s, t)};
      // Past the profile end: hold the final acceleration value.
      const double a_f = accel_at(s, t_f);
      const double tau = t - s.t_end;
      return {p + v * tau + 0.5 * a_f * tau * tau, v + a_f * tau, a_f};
    }
    integrate_segment(s, p0, v0, s.t_end, p0, v0);
  }
  return {p0, v0, 0.0}; // unreachable
}

void check_tiling(const std::vector<AccelSegment>& segments, double t_f, const char* axis) {
  if (segments.empty())
    return;
  if (segments.front().t_start != 0.0)
    throw std::invalid_argument(std::string("profile ") + axis + ": first segment must start at 0");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const AccelSegment& s = segments[i];
    if (!(s.t_end > s.t_start))
      throw std::invalid_argument(std::string("profile ") + axis + ": empty or reversed segment");
    if (s.kind == AccelSegment::Kind::Cosine && s.period_s <= 0.0)
      throw std::invalid_argument(std::string("profile ") + axis + ": cosine needs period > 0");
    if (i + 1 < segments.size() && segments[i + 1].t_start != s.t_end)
      throw std::invalid_argument(std::string("profile ") + axis + ": segments must tile contiguously");
  }
  if (segments.back().t_end < t_f)
    throw std::invalid_argument(std::string("profile ") + axis + ": segments end before t_f");
}

} // namespace

AccelProfile scenario_vertical_ascent(double t_f) {
  AccelProfile p;
  p.t_f = t_f;
  p.x_segments = {
      {AccelSegment::Kind::Const, 0.0, 30.0, 10.0},
      {AccelSegment::Kind::Cosine, 30.0, 60.0, 0.0, 2.5, 30.0, 7.5},
      {AccelSegment::Kind::Const, 60.0, t_f, 10.0},
  };
  return p;
}

AccelProfile scenario_dogleg(double t_f) {
  AccelProfile p = scenario_vertical_ascent(t_f);
  p.z_segments = {
      {AccelSegment::Kind::Const, 0.0, 20.0, 0.0},
      {AccelSegment::Kind::Cosine, 20.0, 60.0, 0.0, 2.5, 40.0, 2.5},
      {AccelSegment::Kind::Cosine, 60.0, t_f, 0.0, -2.5, 40.0, -2.5},
  };
  return p;
}

std::vector<CompiledSegment> integrate_profile(const std::vector<AccelSegment>& segments,
                                               double t_f) {
  check_tiling(segments, t_f, "axis");
  std::vector<CompiledSegment> out;
  double p0 = 0.0, v0 = 0.0;
  for (const AccelSegment& s : segments) {
    out.push_back({s, p0, v0});
    integrate_segment(s, p0, v0, s.t_end, p0, v0);
  }
  return out;
}

ReferenceSample sample_reference(const AccelProfile& profile, double t) {
  if (t < 0.0)
    throw std::invalid_argument("sample_reference: negative time");
  check_tiling(profile.x_segments, profile.t_f, "x");
  check_tiling(profile.z_segments, profile.t_f, "z");

  const AxisSample x = sample_axis(profile.x_segments, profile.t_f, t);
  const AxisSample z = sample_axis(profile.z_segments, profile.t_f, t);
  return {x.p, x.v, x.a, z.p, z.v, z.a, t > profile.t_f};
}

} // namespace tvcsim
