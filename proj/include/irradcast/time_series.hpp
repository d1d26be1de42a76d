#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "irradcast/solar_geometry.hpp"
#include "irradcast/time.hpp"

namespace irradcast {

using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

enum class SeriesKind { irradiance, transmissivity };

inline constexpr double kMaxIrradiance = 1500.0;
inline constexpr double kMaxTransmissivity = 1.5;
/// Below this extraterrestrial irradiance (W/m^2) transmissivity is defined as 0.
inline constexpr double kTransmissivityFloor = 1.0;

inline constexpr Seconds kOneMinute{60};
inline constexpr Seconds kFifteenMinutes{900};

/// Uniformly sampled observations. Sample i covers [start + i*step, start + (i+1)*step).
struct TimeSeries {
  Instant start{};
  Seconds step = kFifteenMinutes;
  Eigen::VectorXd values;
  Mask valid;                             // false marks a gap; the value is then meaningless
  std::optional<Eigen::VectorXd> zenith;  // measured zenith angles, when the source provides them
  GeoLocation location;
  SeriesKind kind = SeriesKind::irradiance;

  Eigen::Index size() const { return values.size(); }
  Instant time_at(Eigen::Index i) const { return start + step * i; }
  /// Instant used for solar quantities of sample i (interval midpoint).
  Instant solar_instant(Eigen::Index i) const { return start + step * i + step / 2; }
  Eigen::Index samples_per_day() const { return Eigen::Index(86400 / step.count()); }

  /// Throws RangeError if any invariant is violated.
  void validate() const;
  /// Contiguous sub-series [offset, offset + count).
  TimeSeries slice(Eigen::Index offset, Eigen::Index count) const;
};

/// Builds a fully valid series from values.
TimeSeries make_series(Instant start, Seconds step, Eigen::VectorXd values, GeoLocation location,
                       SeriesKind kind = SeriesKind::irradiance);

struct CsvSchema {
  std::string timestamp_column = "timestamp";
  std::string irradiance_column = "ghi_wm2";
  std::string zenith_column = "zenith_deg";  // read only when present in the header
};

/// Reads a 1-min or 15-min irradiance CSV. Empty or non-finite irradiance cells
/// become gaps, negative readings are clipped to 0 and readings above 1500 W/m^2
/// are treated as gaps. Throws ParseError, OrderingError or CadenceError.
TimeSeries ingest_csv(std::istream& in, const GeoLocation& location, const CsvSchema& schema = {});
TimeSeries ingest_csv(const std::string& path, const GeoLocation& location, const CsvSchema& schema = {});

/// Writes `timestamp,ghi_wm2[,zenith_deg]`; gaps become empty cells.
void write_csv(std::ostream& out, const TimeSeries& series);
void write_csv(const std::string& path, const TimeSeries& series);

struct GapBlock {
  Instant block_start{};
  int missing = 0;
  bool interpolated = false;  // true: repaired; false: block marked invalid
};

struct Resampled {
  TimeSeries series;
  std::vector<GapBlock> gaps;
};

/// Maximum number of missing 1-min samples a 15-min block may have and still be repaired.
inline constexpr int kMaxInterpolatedGap = 2;

/// 15-min block means of a 1-min series. Leading samples are dropped until the
/// first block starts on a quarter hour; a trailing partial block is dropped.
/// A 15-min input is passed through unchanged.
Resampled resample_15min(const TimeSeries& series);

/// Values with gaps replaced by linear interpolation between the nearest valid
/// neighbors (constant extension at the ends). All-gap series become zeros.
Eigen::VectorXd fill_gaps(const TimeSeries& series);

/// Per-sample solar quantities. Measured zenith is used when available.
struct SolarTrack {
  Eigen::VectorXd zenith;
  Eigen::VectorXd extraterrestrial;
  Mask daytime;
};

SolarTrack solar_track(const TimeSeries& series);

struct NightPolicy {
  enum class Mode { all_day_and_night, clock_window, sun_above_horizon };
  Mode mode = Mode::all_day_and_night;
  int window_start_minute = 5 * 60;  // local standard time
  int window_end_minute = 20 * 60;
};

/// Inclusion mask (true = point may enter training data). Never alters values.
Mask apply_night_policy(const TimeSeries& series, const NightPolicy& policy, const SolarTrack& track);
Mask apply_night_policy(const TimeSeries& series, const NightPolicy& policy);

/// tau = I / I_e where I_e >= 1 W/m^2, else 0; clamped to [0, 1.5].
TimeSeries to_transmissivity(const TimeSeries& irradiance, const SolarTrack& track);
TimeSeries to_transmissivity(const TimeSeries& irradiance);

/// I = tau * I_e, clamped below at 0. Throws DimensionError on length mismatch.
Eigen::VectorXd from_transmissivity(const Eigen::Ref<const Eigen::VectorXd>& tau,
                                    const Eigen::Ref<const Eigen::VectorXd>& extraterrestrial);

struct SplitSpec {
  int training_days = 60;
  int test_days = 7;
};

/// The test window is the last `test_days` of the series; the training window
/// is the `training_days` immediately before it. Throws RangeError when short.
std::pair<TimeSeries, TimeSeries> split_train_test(const TimeSeries& series, const SplitSpec& spec);

}  // namespace irradcast
