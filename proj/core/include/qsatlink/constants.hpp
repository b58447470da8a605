#pragma once

#include <numbers>

namespace qsatlink::constants {

/// Speed of light in vacuum [m/s], exact SI value.
inline constexpr double kSpeedOfLight = 299792458.0;

/// Planck constant [J s], exact SI value.
inline constexpr double kPlanck = 6.62607015e-34;

/// Mean Earth radius [m].
inline constexpr double kEarthRadius = 6371000.0;

/// Geocentric gravitational constant GM [m^3/s^2].
inline constexpr double kEarthGM = 3.986004418e14;

/// Minimum elevation for the plane-parallel airmass model [rad] (5 degrees).
inline constexpr double kElevationFloor = 5.0 * std::numbers::pi / 180.0;

inline constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace qsatlink::constants
