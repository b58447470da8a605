#include "qsatlink/orbitpass.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qsatlink/error.hpp"
#include "qsatlink/textio.hpp"

namespace qsatlink {

namespace {

using constants::kEarthGM;
using constants::kEarthRadius;
using constants::kElevationFloor;
using constants::kPi;
using constants::kSpeedOfLight;

/// Elevation seen from the station when the satellite is at central angle
/// gamma on an orbit of radius r.
double elevation_at_central_angle(double gamma, double orbit_radius) {
  double rho = std::sqrt(kEarthRadius * kEarthRadius +
                         orbit_radius * orbit_radius -
                         2.0 * kEarthRadius * orbit_radius * std::cos(gamma));
  double s = (orbit_radius * std::cos(gamma) - kEarthRadius) / rho;
  return std::asin(std::clamp(s, -1.0, 1.0));
}

/// Central angle at which the elevation equals `elevation`; bisection over
/// the monotone decreasing el(gamma).
double central_angle_for_elevation(double elevation, double orbit_radius) {
  double lo = 0.0;
  double hi = std::acos(kEarthRadius / orbit_radius);  // horizon
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (elevation_at_central_angle(mid, orbit_radius) > elevation) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Degree value whose parse maps back to exactly `rad`; keeps the pass CSV
/// stable under save/load/save.
double canonical_degrees(double rad) {
  double deg = rad * (180.0 / kPi);
  for (double candidate :
       {deg, std::nextafter(deg, 0.0), std::nextafter(deg, 1e300),
        std::nextafter(std::nextafter(deg, 0.0), 0.0),
        std::nextafter(std::nextafter(deg, 1e300), 1e300)}) {
    if (candidate * (kPi / 180.0) == rad) return candidate;
  }
  return deg;
}

}  // namespace

PassGeometry::PassGeometry(std::vector<PassSample> samples)
    : samples_(std::move(samples)) {
  if (samples_.empty()) {
    throw InvalidArgumentError("pass must contain at least one sample");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (!(s.slant_range > 0.0)) {
      throw InvalidArgumentError("slant range must be positive");
    }
    if (!(s.elevation >= 0.0) || !(s.elevation <= kPi / 2.0)) {
      throw InvalidArgumentError("elevation must be in [0, pi/2]");
    }
    if (i > 0 && !(s.time > samples_[i - 1].time)) {
      throw InvalidArgumentError("pass times must be strictly increasing");
    }
  }
}

double PassGeometry::interpolate(double t, double PassSample::*field) const {
  if (t <= samples_.front().time) return samples_.front().*field;
  if (t >= samples_.back().time) return samples_.back().*field;
  auto it = std::upper_bound(
      samples_.begin(), samples_.end(), t,
      [](double value, const PassSample& s) { return value < s.time; });
  const PassSample& hi = *it;
  const PassSample& lo = *(it - 1);
  double w = (t - lo.time) / (hi.time - lo.time);
  return lo.*field + w * (hi.*field - lo.*field);
}

double PassGeometry::range_at(double t) const {
  return interpolate(t, &PassSample::slant_range);
}

double PassGeometry::elevation_at(double t) const {
  return interpolate(t, &PassSample::elevation);
}

double PassGeometry::radial_velocity_at(double t) const {
  return interpolate(t, &PassSample::radial_velocity);
}

double slant_range(double altitude, double elevation, double earth_radius) {
  if (!(altitude > 0.0)) {
    throw InvalidArgumentError("altitude must be positive");
  }
  if (!(elevation >= 0.0) || !(elevation <= kPi / 2.0)) {
    throw InvalidArgumentError("elevation must be in [0, pi/2]");
  }
  double r = earth_radius + altitude;
  double c = earth_radius * std::cos(elevation);
  return std::sqrt(r * r - c * c) - earth_radius * std::sin(elevation);
}

double orbital_speed(double altitude) {
  if (!(altitude > 0.0)) {
    throw InvalidArgumentError("altitude must be positive");
  }
  return std::sqrt(kEarthGM / (kEarthRadius + altitude));
}

PassGeometry circular_pass(double altitude, double max_elevation,
                           double sample_period, double duration) {
  if (!(altitude > 0.0)) {
    throw InvalidArgumentError("altitude must be positive");
  }
  if (!(max_elevation > kElevationFloor) || !(max_elevation <= kPi / 2.0)) {
    throw InvalidArgumentError(
        "max elevation must be in (5 degrees, 90 degrees]");
  }
  if (!(sample_period > 0.0)) {
    throw InvalidArgumentError("sample period must be positive");
  }
  if (duration < 0.0) {
    throw InvalidArgumentError("duration must be >= 0");
  }

  double r = kEarthRadius + altitude;
  double omega = std::sqrt(kEarthGM / (r * r * r));

  // Ground-track offset angle beta: central angle at culmination.
  double beta =
      max_elevation >= kPi / 2.0 ? 0.0
                                 : central_angle_for_elevation(max_elevation, r);
  double cos_beta = std::cos(beta);

  // Half-extent in time out to the elevation floor:
  // cos(gamma(t)) = cos(beta) cos(omega t).
  double gamma_floor = central_angle_for_elevation(kElevationFloor, r);
  double half_extent =
      std::acos(std::clamp(std::cos(gamma_floor) / cos_beta, -1.0, 1.0)) /
      omega;
  double half_span = duration > 0.0 ? std::min(duration / 2.0, half_extent)
                                    : half_extent;

  auto n_half = static_cast<long>(std::floor(half_span / sample_period));
  std::vector<PassSample> samples;
  samples.reserve(static_cast<std::size_t>(2 * n_half + 1));
  for (long k = -n_half; k <= n_half; ++k) {
    double t = static_cast<double>(k) * sample_period;
    double cg = std::clamp(cos_beta * std::cos(omega * t), -1.0, 1.0);
    double gamma = std::acos(cg);
    double rho = std::sqrt(kEarthRadius * kEarthRadius + r * r -
                           2.0 * kEarthRadius * r * cg);
    double el = elevation_at_central_angle(gamma, r);
    double vr =
        kEarthRadius * r * cos_beta * omega * std::sin(omega * t) / rho;
    samples.push_back({t + static_cast<double>(n_half) * sample_period, rho,
                       std::clamp(el, 0.0, kPi / 2.0), vr});
  }
  return PassGeometry(std::move(samples));
}

double round_trip_time(double range) {
  if (!(range > 0.0)) {
    throw InvalidArgumentError("slant range must be positive");
  }
  return 2.0 * range / kSpeedOfLight;
}

PassGeometry load_pass(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("empty pass file '" + name + "'");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string expected = "time_s,slant_range_m,elevation_deg";
  if (std::string(textio::trim(line)) != expected) {
    throw ParseError("pass header must be '" + expected + "'", 1);
  }

  std::vector<PassSample> samples;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto trimmed = textio::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto fields = textio::split(trimmed, ',');
    if (fields.size() != 3) {
      throw ParseError("expected 3 fields", lineno);
    }
    PassSample s;
    s.time = textio::parse_double(fields[0], lineno);
    s.slant_range = textio::parse_double(fields[1], lineno);
    double el_deg = textio::parse_double(fields[2], lineno);
    if (el_deg < 0.0 || el_deg > 90.0) {
      throw ParseError("elevation_deg must be in [0, 90]", lineno);
    }
    s.elevation = el_deg * (kPi / 180.0);
    if (!(s.slant_range > 0.0)) {
      throw ParseError("slant_range_m must be positive", lineno);
    }
    if (!samples.empty() && !(s.time > samples.back().time)) {
      throw ParseError("time_s must be strictly increasing", lineno);
    }
    samples.push_back(s);
  }
  if (samples.empty()) {
    throw ParseError("pass file '" + name + "' has no samples");
  }

  // Radial velocity from central differences, one-sided at the ends.
  std::size_t n = samples.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (n == 1) break;
    std::size_t lo = i == 0 ? 0 : i - 1;
    std::size_t hi = i + 1 == n ? i : i + 1;
    samples[i].radial_velocity =
        (samples[hi].slant_range - samples[lo].slant_range) /
        (samples[hi].time - samples[lo].time);
  }
  return PassGeometry(std::move(samples));
}

PassGeometry load_pass(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return load_pass(in, path);
}

std::string pass_to_csv(const PassGeometry& pass) {
  std::string out = "time_s,slant_range_m,elevation_deg\n";
  for (const auto& s : pass.samples()) {
    out += textio::format_exact(s.time);
    out += ',';
    out += textio::format_exact(s.slant_range);
    out += ',';
    out += textio::format_exact(canonical_degrees(s.elevation));
    out += '\n';
  }
  return out;
}

void save_pass(const PassGeometry& pass, const std::string& path) {
  textio::atomic_write(path, pass_to_csv(pass));
}

}  // namespace qsatlink
