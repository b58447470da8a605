#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qsatlink/constants.hpp"

namespace qsatlink {

struct PassSample {
  double time = 0.0;             // [s] from the first sample
  double slant_range = 0.0;      // [m]
  double elevation = 0.0;        // [rad]
  double radial_velocity = 0.0;  // [m/s], positive when receding
};

/// Time series of pass geometry. Times strictly increasing, ranges positive,
/// elevations within [0, pi/2]; checked on construction.
class PassGeometry {
public:
  explicit PassGeometry(std::vector<PassSample> samples);

  const std::vector<PassSample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }

  double start_time() const { return samples_.front().time; }
  double end_time() const { return samples_.back().time; }
  double duration() const { return end_time() - start_time(); }

  /// Linear interpolation, clamped to the pass span.
  double range_at(double t) const;
  double elevation_at(double t) const;
  double radial_velocity_at(double t) const;

private:
  double interpolate(double t, double PassSample::*field) const;

  std::vector<PassSample> samples_;
};

/// Spherical-Earth slant range for a satellite at the given altitude seen at
/// the given elevation: sqrt((Re+h)^2 - Re^2 cos^2 el) - Re sin el.
double slant_range(double altitude, double elevation,
                   double earth_radius = constants::kEarthRadius);

/// Circular-orbit speed sqrt(GM / (Re + h)).
double orbital_speed(double altitude);

/// Synthetic pass of a circular-orbit satellite over a ground station on a
/// non-rotating spherical Earth. The ground track reaches max_elevation at
/// culmination; the pass is sampled symmetrically about it. duration = 0
/// extends the pass to the 5 degree elevation floor on both sides, otherwise
/// the pass spans [0, duration] (clamped to the above-floor extent).
PassGeometry circular_pass(double altitude, double max_elevation,
                           double sample_period, double duration = 0.0);

/// Two-way light time 2R/c.
double round_trip_time(double slant_range);

/// Pass CSV with header time_s,slant_range_m,elevation_deg. Radial velocity
/// is derived by central differences. Parse errors carry line numbers.
PassGeometry load_pass(std::istream& in, const std::string& name = "<stream>");
PassGeometry load_pass(const std::string& path);

/// Textual form of the pass; save_pass followed by load_pass and save_pass
/// again reproduces the bytes.
std::string pass_to_csv(const PassGeometry& pass);
void save_pass(const PassGeometry& pass, const std::string& path);

}  // namespace qsatlink
