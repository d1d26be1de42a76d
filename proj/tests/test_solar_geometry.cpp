#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "irradcast/error.hpp"
#include "irradcast/solar_geometry.hpp"
#include "test_support.hpp"

using namespace irradcast;
using testing_support::at;

TEST_SUITE("solar_geometry") {

TEST_CASE("sun near the zenith at equatorial equinox noon") {
  // 2021-03-20 equinox; at lon 0 true solar noon is 12:00 UTC minus the equation of time (~ -7.5 min).
  const GeoLocation origin{0.0, 0.0, 0.0, 0};
  const double z = solar_zenith(origin, at("2021-03-20T12:07:30Z"));
  CHECK(z < 0.7);
}

TEST_CASE("Golden, Colorado at the 2020 solstice matches the frozen SPA value") {
  const GeoLocation golden{39.74, -105.18, 1829.0, -420};
  // NREL SPA (pvlib, geometric zenith) for 2020-06-21 19:00 UTC.
  const double oracle = 16.31675377906049;
  CHECK(std::abs(solar_zenith(golden, at("2020-06-21T19:00:00Z")) - oracle) < 0.2);
}

TEST_CASE("local solar midnight is night at any latitude") {
  for (double lat : {-60.0, -30.0, 0.0, 30.0, 60.0}) {
    for (double lon : {-150.0, 0.0, 120.0}) {
      const GeoLocation loc{lat, lon, 0.0, 0};
      // Solar midnight near 00:00 local mean time = -lon/15 hours UTC.
      const double hours = std::fmod(24.0 - lon / 15.0, 24.0);
      const Instant t = at("2021-03-20T00:00:00Z") + Seconds(long(hours * 3600));
      CAPTURE(lat);
      CAPTURE(lon);
      CHECK(solar_zenith(loc, t) > kHorizonZenithDeg);
    }
  }
}

TEST_CASE("daytime boundary") {
  CHECK(is_daytime(0.0));
  CHECK_FALSE(is_daytime(90.83));
  CHECK_FALSE(is_daytime(120.0));
  CHECK(is_daytime(90.82));
}

TEST_CASE("eccentricity extremes and periodicity") {
  const double jan = eccentricity_correction(at("2021-01-03T12:00:00Z"));
  const double jul = eccentricity_correction(at("2021-07-04T12:00:00Z"));
  CHECK(jan == doctest::Approx(1.033).epsilon(0.002));
  CHECK(jul == doctest::Approx(0.967).epsilon(0.002));
  // Independent oracle: (1 + 0.0167 cos(2 pi (doy - 3) / 365.25))^2 is the
  // inverse-square law with perihelion on Jan 3.
  for (int doy : {1, 50, 100, 150, 200, 250, 300, 350}) {
    const Instant t = at("2021-01-01T00:00:00Z") + Seconds(long(doy - 1) * 86400);
    const double oracle = std::pow(1.0 + 0.0167 * std::cos(2.0 * M_PI * (doy - 3) / 365.25), 2.0);
    CAPTURE(doy);
    CHECK(std::abs(eccentricity_correction(t) - oracle) < 0.002);
  }
  const Instant a = at("2019-05-10T06:00:00Z");
  const Instant b = a + Seconds(long(365.2422 * 86400));
  CHECK(std::abs(eccentricity_correction(a) - eccentricity_correction(b)) < 0.001);
}

TEST_CASE("extraterrestrial irradiance") {
  CHECK(extraterrestrial_irradiance(0.0, 1.0) == 1360.8);
  CHECK(extraterrestrial_irradiance(60.0, 1.0) == doctest::Approx(680.4).epsilon(1e-12));
  CHECK(extraterrestrial_irradiance(90.0, 1.0) == 0.0);
  for (double z = 90.0; z <= 180.0; z += 0.25) CHECK(extraterrestrial_irradiance(z, 1.03) == 0.0);
  CHECK(extraterrestrial_irradiance(89.9, 1.0) > 0.0);
}

TEST_CASE("zenith agrees with the SPA fixture within 0.2 degrees") {
  std::ifstream in(IRRADCAST_TEST_DATA "/spa_reference.csv");
  REQUIRE(in);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  double worst = 0.0;
  while (std::getline(in, line)) {
    std::istringstream cells(line);
    std::string cell;
    double v[5];
    for (double& x : v) {
      std::getline(cells, cell, ',');
      x = std::stod(cell);
    }
    const GeoLocation loc{v[0], v[1], v[2], 0};
    const Instant t{Seconds(static_cast<long long>(v[3]))};
    worst = std::max(worst, std::abs(solar_zenith(loc, t) - v[4]));
    ++rows;
  }
  CHECK(rows >= 1000);
  CHECK(worst < 0.2);
}

TEST_CASE("location validation and ephemeris window") {
  CHECK_THROWS_AS(GeoLocation({91.0, 0.0, 0.0, 0}).validate(), RangeError);
  CHECK_THROWS_AS(GeoLocation({0.0, 181.0, 0.0, 0}).validate(), RangeError);
  CHECK_THROWS_AS(solar_zenith(GeoLocation{}, at("1900-01-01T00:00:00Z")), RangeError);
}

TEST_CASE("solar state consistency") {
  const GeoLocation loc{39.74, -105.18, 1829.0, -420};
  const Instant t = at("2020-06-21T19:00:00Z");
  const SolarState s = solar_state(loc, t);
  CHECK(s.zenith == doctest::Approx(solar_zenith(loc, t)));
  CHECK(s.extraterrestrial_irradiance ==
        doctest::Approx(kSolarConstant * s.eccentricity * std::cos(s.zenith * M_PI / 180.0)));
  CHECK(s.is_daytime);
  const Eigen::VectorXd z = zenith_series(loc, t, Seconds(900), 4);
  CHECK(z[2] == doctest::Approx(solar_zenith(loc, t + Seconds(1800))));
}

}
