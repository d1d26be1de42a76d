#include "irradcast/forecast.hpp"

#include <algorithm>

#include "irradcast/error.hpp"

namespace irradcast {

const std::vector<int>& TrainedModel::residual_lags() const {
  static const std::vector<int> none;
  return none;
}

Eigen::VectorXd TrainedModel::one_step_residuals(const Eigen::Ref<const Eigen::VectorXd>& history) const {
  return Eigen::VectorXd::Zero(history.size());
}

int TrainedModel::history_depth() const {
  int depth = 0;
  for (int o : required_lags()) depth = std::max(depth, -o);
  for (int o : residual_lags()) depth = std::max(depth, -o);
  return depth;
}

RecursionOptions bounds_for(SeriesKind kind) {
  return {0.0, kind == SeriesKind::irradiance ? kMaxIrradiance : kMaxTransmissivity};
}

double resolve_lag(std::span<const double> history, std::span<const double> forecasts, int step, int offset) {
  const long rel = long(step) - 1 + offset;  // position relative to t
  if (rel <= 0) {
    const long idx = long(history.size()) - 1 + rel;
    if (idx < 0) throw RangeError("history too short for lag " + std::to_string(offset));
    return history[std::size_t(idx)];
  }
  return forecasts[std::size_t(rel - 1)];
}

ForecastVector recursive_forecast(const TrainedModel& model, std::span<const double> history, int horizon,
                                  const RecursionOptions& options, std::span<const double> residuals) {
  if (horizon < 1) throw RangeError("horizon must be >= 1");
  if (history.empty() || long(history.size()) <= model.history_depth())
    throw RangeError("history of " + std::to_string(history.size()) + " samples too short; model needs " +
                     std::to_string(model.history_depth() + 1));

  const auto& lag_offsets = model.required_lags();
  const auto& res_offsets = model.residual_lags();
  Eigen::VectorXd own_residuals;
  if (!res_offsets.empty() && residuals.empty()) {
    own_residuals = model.one_step_residuals(Eigen::Map<const Eigen::VectorXd>(history.data(), Eigen::Index(history.size())));
    residuals = std::span<const double>(own_residuals.data(), std::size_t(own_residuals.size()));
  }
  if (!res_offsets.empty() && residuals.size() != history.size())
    throw DimensionError("residuals must align with history");

  ForecastVector out;
  out.origin = Eigen::Index(history.size()) - 1;
  out.values.resize(horizon);
  std::vector<double> lags(lag_offsets.size());
  std::vector<double> res(res_offsets.size());
  const std::vector<double> no_future_shocks(std::size_t(horizon), 0.0);
  for (int j = 1; j <= horizon; ++j) {
    std::span<const double> done(out.values.data(), std::size_t(j - 1));
    for (std::size_t i = 0; i < lag_offsets.size(); ++i) lags[i] = resolve_lag(history, done, j, lag_offsets[i]);
    for (std::size_t i = 0; i < res_offsets.size(); ++i)
      res[i] = resolve_lag(residuals, no_future_shocks, j, res_offsets[i]);
    out.values[j - 1] = std::clamp(model.predict_one(lags, res), options.lower, options.upper);
  }
  return out;
}

SeasonalPersistenceModel::SeasonalPersistenceModel(int season) : season_(season), lags_{1 - season} {
  if (season < 1) throw RangeError("season must be >= 1");
}

std::string SeasonalPersistenceModel::describe() const { return "seasonal_persistence(s=" + std::to_string(season_) + ")"; }

double persistence_predict(std::span<const double> history) {
  if (history.empty()) throw RangeError("empty history");
  return history.back();
}

double seasonal_persistence_predict(std::span<const double> history, int step, int season) {
  if (step < 1 || season < 1) throw RangeError("step and season must be >= 1");
  const long idx = long(history.size()) - 1 + step - season;
  if (idx < 0 || idx >= long(history.size()))
    throw RangeError("history does not reach y_{t+" + std::to_string(step) + "-" + std::to_string(season) + "}");
  return history[std::size_t(idx)];
}

Eigen::VectorXd reference_persistence_forecast(double tau_now, const Eigen::Ref<const Eigen::VectorXd>& extraterrestrial_ahead) {
  const Eigen::VectorXd tau = Eigen::VectorXd::Constant(extraterrestrial_ahead.size(), tau_now);
  return from_transmissivity(tau, extraterrestrial_ahead);
}

Eigen::VectorXd reference_persistence_forecast(const TimeSeries& irradiance_history, int horizon) {
  if (irradiance_history.size() < 1) throw RangeError("empty history");
  if (horizon < 1) throw RangeError("horizon must be >= 1");
  const Eigen::Index t = irradiance_history.size() - 1;
  const TimeSeries last = irradiance_history.slice(t, 1);
  const double tau_now = to_transmissivity(last).values[0];
  Eigen::VectorXd ahead(horizon);
  for (int j = 1; j <= horizon; ++j) {
    const Instant target = irradiance_history.solar_instant(t + j);
    const double z = solar_zenith(irradiance_history.location, target);
    ahead[j - 1] = is_daytime(z) ? extraterrestrial_irradiance(z, eccentricity_correction(target)) : 0.0;
  }
  return reference_persistence_forecast(tau_now, ahead);
}

}  // namespace irradcast
