#include "irradcast/time_series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "irradcast/error.hpp"

namespace irradcast {
namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    cells.push_back(line.substr(pos, comma == std::string_view::npos ? line.size() - pos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  for (auto& c : cells) {
    while (!c.empty() && (c.front() == ' ' || c.front() == '\t')) c.remove_prefix(1);
    while (!c.empty() && (c.back() == ' ' || c.back() == '\t' || c.back() == '\r')) c.remove_suffix(1);
  }
  return cells;
}

std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) throw RangeError("not a number: '" + std::string(cell) + "'");
  return value;
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

void TimeSeries::validate() const {
  if (values.size() < 1) throw RangeError("time series is empty");
  if (valid.size() != values.size()) throw DimensionError("validity mask length differs from values");
  if (zenith && zenith->size() != values.size()) throw DimensionError("zenith length differs from values");
  if (step.count() <= 0) throw RangeError("non-positive sampling step");
  location.validate();
  const double upper = kind == SeriesKind::irradiance ? kMaxIrradiance : kMaxTransmissivity;
  for (Eigen::Index i = 0; i < size(); ++i) {
    if (!valid[i]) continue;
    if (!(values[i] >= 0.0 && values[i] <= upper))
      throw RangeError("value " + std::to_string(values[i]) + " at index " + std::to_string(i) + " out of range");
  }
}

TimeSeries TimeSeries::slice(Eigen::Index offset, Eigen::Index count) const {
  if (offset < 0 || count < 0 || offset + count > size()) throw RangeError("slice outside series");
  TimeSeries out;
  out.start = time_at(offset);
  out.step = step;
  out.values = values.segment(offset, count);
  out.valid = valid.segment(offset, count);
  if (zenith) out.zenith = zenith->segment(offset, count);
  out.location = location;
  out.kind = kind;
  return out;
}

TimeSeries make_series(Instant start, Seconds step, Eigen::VectorXd values, GeoLocation location, SeriesKind kind) {
  TimeSeries s;
  s.start = start;
  s.step = step;
  s.valid = Mask::Constant(values.size(), true);
  s.values = std::move(values);
  s.location = location;
  s.kind = kind;
  return s;
}

TimeSeries ingest_csv(std::istream& in, const GeoLocation& location, const CsvSchema& schema) {
  location.validate();
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("missing header row", 1);
  ++line_no;
  const auto header = split_commas(line);
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return std::size_t(it - header.begin());
  };
  const auto ts_col = column(schema.timestamp_column);
  const auto ghi_col = column(schema.irradiance_column);
  const auto zen_col = column(schema.zenith_column);
  if (!ts_col) throw ParseError("header lacks column '" + schema.timestamp_column + "'", 1);
  if (!ghi_col) throw ParseError("header lacks column '" + schema.irradiance_column + "'", 1);

  std::vector<Instant> times;
  std::vector<double> values;
  std::vector<bool> valid;
  std::vector<double> zeniths;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_commas(line);
    if (cells.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " cells, found " + std::to_string(cells.size()),
                       line_no);
    Instant t;
    std::optional<double> ghi;
    try {
      t = parse_iso8601(cells[*ts_col]);
      ghi = parse_number(cells[*ghi_col]);
      if (zen_col) {
        const auto z = parse_number(cells[*zen_col]);
        if (!z) throw RangeError("empty zenith cell");
        zeniths.push_back(*z);
      }
    } catch (const RangeError& e) {
      throw ParseError(e.what(), line_no);
    }
    if (!times.empty()) {
      const auto delta = t - times.back();
      if (delta <= Seconds{0}) throw OrderingError("timestamp not strictly after previous row", line_no);
      if (times.size() == 1) {
        if (delta != kOneMinute && delta != kFifteenMinutes)
          throw CadenceError("sampling interval must be 1 or 15 minutes", line_no);
      } else if (delta != times[1] - times[0]) {
        throw CadenceError("sampling interval changes", line_no);
      }
    }
    times.push_back(t);
    bool ok = ghi.has_value() && std::isfinite(*ghi) && *ghi <= kMaxIrradiance;
    values.push_back(ok ? std::max(*ghi, 0.0) : 0.0);
    valid.push_back(ok);
  }
  if (times.empty()) throw ParseError("no data rows", line_no);

  TimeSeries s;
  s.start = times.front();
  s.step = times.size() > 1 ? times[1] - times[0] : kFifteenMinutes;
  s.values = Eigen::Map<const Eigen::VectorXd>(values.data(), Eigen::Index(values.size()));
  s.valid.resize(Eigen::Index(valid.size()));
  for (std::size_t i = 0; i < valid.size(); ++i) s.valid[Eigen::Index(i)] = valid[i];
  if (zen_col) s.zenith = Eigen::Map<const Eigen::VectorXd>(zeniths.data(), Eigen::Index(zeniths.size()));
  s.location = location;
  s.kind = SeriesKind::irradiance;
  return s;
}

TimeSeries ingest_csv(const std::string& path, const GeoLocation& location, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return ingest_csv(in, location, schema);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

void write_csv(std::ostream& out, const TimeSeries& series) {
  out << "timestamp,ghi_wm2";
  if (series.zenith) out << ",zenith_deg";
  out << '\n';
  for (Eigen::Index i = 0; i < series.size(); ++i) {
    out << format_iso8601(series.time_at(i)) << ',';
    if (series.valid[i]) out << format_value(series.values[i]);
    if (series.zenith) out << ',' << format_value((*series.zenith)[i]);
    out << '\n';
  }
}

void write_csv(const std::string& path, const TimeSeries& series) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_csv(out, series);
}

Resampled resample_15min(const TimeSeries& series) {
  if (series.step == kFifteenMinutes) return {series, {}};
  if (series.step != kOneMinute) throw CadenceError("resampling needs a 1-min series", 0);

  Eigen::Index first = 0;
  while (first < series.size() && series.time_at(first).time_since_epoch().count() % 900 != 0) ++first;
  const Eigen::Index blocks = (series.size() - first) / 15;
  if (blocks < 1) throw RangeError("fewer than 15 aligned 1-min samples");

  const Eigen::VectorXd filled = fill_gaps(series);
  Resampled out;
  out.series.start = series.time_at(first);
  out.series.step = kFifteenMinutes;
  out.series.values.resize(blocks);
  out.series.valid = Mask::Constant(blocks, true);
  if (series.zenith) out.series.zenith = Eigen::VectorXd(blocks);
  out.series.location = series.location;
  out.series.kind = series.kind;

  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index offset = first + 15 * b;
    const int missing = int((!series.valid.segment(offset, 15)).count());
    if (missing > 0) out.gaps.push_back({series.time_at(offset), missing, missing <= kMaxInterpolatedGap});
    if (missing > kMaxInterpolatedGap) {
      out.series.valid[b] = false;
      out.series.values[b] = 0.0;
    } else {
      out.series.values[b] = filled.segment(offset, 15).mean();
    }
    if (series.zenith) (*out.series.zenith)[b] = series.zenith->segment(offset, 15).mean();
  }
  return out;
}

Eigen::VectorXd fill_gaps(const TimeSeries& series) {
  const Eigen::Index n = series.size();
  Eigen::VectorXd out = series.values;
  Eigen::Index prev = -1;
  for (Eigen::Index i = 0; i <= n; ++i) {
    if (i < n && !series.valid[i]) continue;
    // fill (prev, i)
    for (Eigen::Index j = prev + 1; j < i; ++j) {
      if (prev < 0 && i >= n) out[j] = 0.0;
      else if (prev < 0) out[j] = series.values[i];
      else if (i >= n) out[j] = series.values[prev];
      else out[j] = series.values[prev] + (series.values[i] - series.values[prev]) * double(j - prev) / double(i - prev);
    }
    prev = i;
  }
  return out;
}

SolarTrack solar_track(const TimeSeries& series) {
  const Eigen::Index n = series.size();
  SolarTrack track;
  track.zenith.resize(n);
  track.extraterrestrial.resize(n);
  track.daytime.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Instant t = series.solar_instant(i);
    const double z = series.zenith ? (*series.zenith)[i] : solar_zenith(series.location, t);
    track.zenith[i] = z;
    track.daytime[i] = is_daytime(z);
    track.extraterrestrial[i] = track.daytime[i] ? extraterrestrial_irradiance(z, eccentricity_correction(t)) : 0.0;
  }
  return track;
}

Mask apply_night_policy(const TimeSeries& series, const NightPolicy& policy, const SolarTrack& track) {
  if (policy.window_start_minute >= policy.window_end_minute) throw RangeError("night window start must precede end");
  const Eigen::Index n = series.size();
  switch (policy.mode) {
    case NightPolicy::Mode::all_day_and_night:
      return Mask::Constant(n, true);
    case NightPolicy::Mode::clock_window: {
      Mask m(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const int minute = local_minute_of_day(series.time_at(i), series.location.utc_offset_minutes);
        m[i] = minute >= policy.window_start_minute && minute < policy.window_end_minute;
      }
      return m;
    }
    case NightPolicy::Mode::sun_above_horizon:
      if (track.daytime.size() != n) throw DimensionError("solar track length differs from series");
      return track.daytime;
  }
  return Mask::Constant(n, true);
}

Mask apply_night_policy(const TimeSeries& series, const NightPolicy& policy) {
  if (policy.mode != NightPolicy::Mode::sun_above_horizon) return apply_night_policy(series, policy, SolarTrack{});
  return apply_night_policy(series, policy, solar_track(series));
}

TimeSeries to_transmissivity(const TimeSeries& irradiance, const SolarTrack& track) {
  if (irradiance.kind != SeriesKind::irradiance) throw RangeError("series is already transmissivity");
  if (track.extraterrestrial.size() != irradiance.size()) throw DimensionError("solar track length differs from series");
  TimeSeries out = irradiance;
  out.kind = SeriesKind::transmissivity;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double ie = track.extraterrestrial[i];
    out.values[i] = ie >= kTransmissivityFloor ? std::clamp(irradiance.values[i] / ie, 0.0, kMaxTransmissivity) : 0.0;
  }
  return out;
}

TimeSeries to_transmissivity(const TimeSeries& irradiance) {
  return to_transmissivity(irradiance, solar_track(irradiance));
}

Eigen::VectorXd from_transmissivity(const Eigen::Ref<const Eigen::VectorXd>& tau,
                                    const Eigen::Ref<const Eigen::VectorXd>& extraterrestrial) {
  if (tau.size() != extraterrestrial.size()) throw DimensionError("forecast and extraterrestrial lengths differ");
  return tau.cwiseProduct(extraterrestrial).cwiseMax(0.0);
}

std::pair<TimeSeries, TimeSeries> split_train_test(const TimeSeries& series, const SplitSpec& spec) {
  if (spec.training_days < 1 || spec.test_days < 1) throw RangeError("training and test days must be >= 1");
  const Eigen::Index per_day = series.samples_per_day();
  const Eigen::Index train = per_day * spec.training_days;
  const Eigen::Index test = per_day * spec.test_days;
  if (train + test > series.size())
    throw RangeError("series of " + std::to_string(series.size()) + " samples too short for " +
                     std::to_string(spec.training_days) + "+" + std::to_string(spec.test_days) + " days");
  const Eigen::Index test_start = series.size() - test;
  return {series.slice(test_start - train, train), series.slice(test_start, test)};
}

}  // namespace irradcast
