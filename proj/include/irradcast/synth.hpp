#pragma once

#include <cstdint>

#include "irradcast/time_series.hpp"

namespace irradcast {

/// Seeded stand-in for measured irradiance: I = I_e * c, where the cloud
/// factor c follows a daily weather regime (clear, mixed, overcast; Markov
/// chain) and an Ornstein-Uhlenbeck process reverting to the regime mean
/// within the day.
struct SynthSpec {
  GeoLocation location{39.74, -105.18, 1829.0, -7 * 60};
  Instant start = Instant{std::chrono::sys_days{std::chrono::year{2020} / 5 / 1}};
  int days = 67;
  std::uint64_t seed = 1;
  Seconds step = kOneMinute;
};

inline constexpr double kMaxCloudFactor = 1.1;

struct SynthOutput {
  TimeSeries series;       // irradiance, W/m^2
  Eigen::VectorXd cloud;   // cloud factor per sample, in [0, 1.1]
};

/// Throws RangeError when days < 8 or the step does not divide a day.
SynthOutput synthesize(const SynthSpec& spec);

}  // namespace irradcast
