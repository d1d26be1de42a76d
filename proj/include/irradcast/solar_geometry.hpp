#pragma once

#include <Eigen/Core>

#include "irradcast/time.hpp"

namespace irradcast {

/// Solar constant (W/m^2).
inline constexpr double kSolarConstant = 1360.8;

/// Refraction-corrected horizon: the sun is up iff zenith < 90.83 degrees.
inline constexpr double kHorizonZenithDeg = 90.83;

struct GeoLocation {
  double latitude = 0.0;   // degrees, [-90, 90]
  double longitude = 0.0;  // degrees, [-180, 180], east positive
  double elevation = 0.0;  // meters, >= -500
  int utc_offset_minutes = 0;

  /// Throws RangeError when a field is outside its documented range.
  void validate() const;
};

struct SolarState {
  double zenith = 0.0;  // degrees
  double eccentricity = 1.0;
  double extraterrestrial_irradiance = 0.0;  // W/m^2 on a horizontal plane
  bool is_daytime = false;
};

/// Geometric solar zenith angle in degrees (no refraction).
///
/// Low-precision ephemeris (mean elements, equation of center, nutation in
/// longitude and obliquity, equation of time). Zenith error stays well below
/// 0.2 degrees between 1950 and 2100; outside that window RangeError is thrown.
double solar_zenith(const GeoLocation& location, Instant t);

inline bool is_daytime(double zenith_deg) { return zenith_deg < kHorizonZenithDeg; }

/// Spencer Fourier-series correction for the Earth-Sun distance, (r0/r)^2.
double eccentricity_correction(Instant t);

/// eccentricity * I_s * cos(zenith), clamped at zero once the sun is at or
/// below the geometric horizon.
double extraterrestrial_irradiance(double zenith_deg, double eccentricity);

double extraterrestrial_irradiance(const GeoLocation& location, Instant t);

SolarState solar_state(const GeoLocation& location, Instant t);

/// Zenith angles for `count` instants start, start + step, ...
Eigen::VectorXd zenith_series(const GeoLocation& location, Instant start, Seconds step, Eigen::Index count);

}  // namespace irradcast
