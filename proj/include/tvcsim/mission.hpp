#pragma once

#include <string>
#include <vector>

namespace tvcsim {

// One acceleration segment, active on (t_start, t_end]. Cosine segments use
// absolute time phase: a(t) = amp cos(2 pi t / period) + offset.
struct AccelSegment {
  enum class Kind { Const, Cosine };
  Kind kind;
  double t_start, t_end; // [s]
  double value = 0.0;    // Const: acceleration [m/s^2]
  double amp = 0.0, period_s = 0.0, offset = 0.0; // Cosine parameters
};

// Piecewise acceleration profiles for both translational axes. Segments
// must tile (0, t_f] contiguously per axis. Past t_f the final acceleration
// value holds and samples are flagged as coast.
struct AccelProfile {
  std::vector<AccelSegment> x_segments;
  std::vector<AccelSegment> z_segments;
  double t_f = 103.0; // [s]
};

struct ReferenceSample {
  double x_d, xdot_d, xddot_d;
  double z_d, zdot_d, zddot_d;
  bool coast; // t > t_f
};

// Vertical ascent: 10 m/s^2, a cosine dip to 5 m/s^2 through the transonic
// regime, then 10 m/s^2 to burnout. No downrange maneuver.
AccelProfile scenario_vertical_ascent(double t_f = 103.0);

// Same vertical profile plus a downrange dogleg: symmetric cosine
// acceleration/deceleration lobes peaking at +/-5 m/s^2.
AccelProfile scenario_dogleg(double t_f = 103.0);

// Closed-form reference at time t: accelerations integrate exactly
// (piecewise polynomial + sinusoid antiderivatives), zero initial state.
ReferenceSample sample_reference(const AccelProfile& profile, double t);

// Validates segment tiling and returns per-segment initial conditions.
// Called lazily by sample_reference; exposed for tests.
struct CompiledSegment {
  AccelSegment seg;
  double p0, v0; // position and velocity at seg.t_start
};
std::vector<CompiledSegment> integrate_profile(const std::vector<AccelSegment>& segments,
                                               double t_f);

} // namespace tvcsim
