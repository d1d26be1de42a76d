#include "irradcast/solar_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "irradcast/error.hpp"

namespace irradcast {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double wrap_degrees(double x) {
  x = std::fmod(x, 360.0);
  return x < 0.0 ? x + 360.0 : x;
}

}  // namespace

void GeoLocation::validate() const {
  if (!(latitude >= -90.0 && latitude <= 90.0))
    throw RangeError("latitude " + std::to_string(latitude) + " outside [-90, 90]");
  if (!(longitude >= -180.0 && longitude <= 180.0))
    throw RangeError("longitude " + std::to_string(longitude) + " outside [-180, 180]");
  if (!(elevation >= -500.0)) throw RangeError("elevation below -500 m");
  if (utc_offset_minutes < -14 * 60 || utc_offset_minutes > 14 * 60)
    throw RangeError("utc offset outside [-14h, +14h]");
}

double solar_zenith(const GeoLocation& location, Instant t) {
  const int year = utc_year(t);
  if (year < 1950 || year > 2100)
    throw RangeError("timestamp year " + std::to_string(year) + " outside ephemeris window 1950-2100");

  const double jd = julian_day(t);
  const double T = (jd - 2451545.0) / 36525.0;

  const double mean_long = wrap_degrees(280.46646 + T * (36000.76983 + 0.0003032 * T));
  const double mean_anom = 357.52911 + T * (35999.05029 - 0.0001537 * T);
  const double ecc = 0.016708634 - T * (0.000042037 + 0.0000001267 * T);

  const double m = mean_anom * kDeg;
  const double center = std::sin(m) * (1.914602 - T * (0.004817 + 0.000014 * T)) +
                        std::sin(2 * m) * (0.019993 - 0.000101 * T) + std::sin(3 * m) * 0.000289;
  const double true_long = mean_long + center;
  const double omega = (125.04 - 1934.136 * T) * kDeg;
  const double apparent_long = (true_long - 0.00569 - 0.00478 * std::sin(omega)) * kDeg;

  const double obliquity0 = 23.0 + (26.0 + (21.448 - T * (46.815 + T * (0.00059 - T * 0.001813))) / 60.0) / 60.0;
  const double obliquity = (obliquity0 + 0.00256 * std::cos(omega)) * kDeg;

  const double declination = std::asin(std::sin(obliquity) * std::sin(apparent_long));

  const double y = std::pow(std::tan(obliquity / 2.0), 2);
  const double l0 = mean_long * kDeg;
  const double eot_rad = y * std::sin(2 * l0) - 2 * ecc * std::sin(m) +
                         4 * ecc * y * std::sin(m) * std::cos(2 * l0) - 0.5 * y * y * std::sin(4 * l0) -
                         1.25 * ecc * ecc * std::sin(2 * m);
  const double eot_minutes = 4.0 * eot_rad / kDeg;

  const auto day_start = std::chrono::floor<std::chrono::days>(t);
  const double ut_minutes = double((t - day_start).count()) / 60.0;
  const double true_solar_minutes = ut_minutes + eot_minutes + 4.0 * location.longitude;
  const double hour_angle = (true_solar_minutes / 4.0 - 180.0) * kDeg;

  const double lat = location.latitude * kDeg;
  const double cos_zenith = std::sin(lat) * std::sin(declination) +
                            std::cos(lat) * std::cos(declination) * std::cos(hour_angle);
  return std::acos(std::clamp(cos_zenith, -1.0, 1.0)) / kDeg;
}

double eccentricity_correction(Instant t) {
  const double gamma = 2.0 * std::numbers::pi * day_of_year_fraction(t) / 365.0;
  return 1.000110 + 0.034221 * std::cos(gamma) + 0.001280 * std::sin(gamma) + 0.000719 * std::cos(2 * gamma) +
         0.000077 * std::sin(2 * gamma);
}

double extraterrestrial_irradiance(double zenith_deg, double eccentricity) {
  if (zenith_deg >= 90.0) return 0.0;
  const double c = std::cos(zenith_deg * kDeg);
  return c > 0.0 ? eccentricity * kSolarConstant * c : 0.0;
}

double extraterrestrial_irradiance(const GeoLocation& location, Instant t) {
  return extraterrestrial_irradiance(solar_zenith(location, t), eccentricity_correction(t));
}

SolarState solar_state(const GeoLocation& location, Instant t) {
  SolarState s;
  s.zenith = solar_zenith(location, t);
  s.eccentricity = eccentricity_correction(t);
  s.is_daytime = is_daytime(s.zenith);
  // The 90.83 threshold sits past 90, so night always implies zero here.
  s.extraterrestrial_irradiance = s.is_daytime ? extraterrestrial_irradiance(s.zenith, s.eccentricity) : 0.0;
  return s;
}

Eigen::VectorXd zenith_series(const GeoLocation& location, Instant start, Seconds step, Eigen::Index count) {
  Eigen::VectorXd out(count);
  for (Eigen::Index i = 0; i < count; ++i) out[i] = solar_zenith(location, start + step * i);
  return out;
}

}  // namespace irradcast
