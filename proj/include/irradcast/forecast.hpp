#pragma once

#include <Eigen/Core>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "irradcast/time_series.hpp"

namespace irradcast {

/// Fitted one-step forecaster.
///
/// Lag offsets are relative to the latest known value: 0 is y_t, -1 is
/// y_{t-1}. `predict_one` receives the values at `required_lags()` in that
/// order and returns the prediction for t+1. Models with moving-average terms
/// also consume past one-step residuals at `residual_lags()`.
class TrainedModel {
 public:
  virtual ~TrainedModel() = default;

  virtual const std::vector<int>& required_lags() const = 0;
  virtual const std::vector<int>& residual_lags() const;

  virtual double predict_one(std::span<const double> lags, std::span<const double> residuals) const = 0;
  double predict_one(std::span<const double> lags) const { return predict_one(lags, {}); }

  /// e_i = y_i - yhat_{i|i-1} along a history; zero where the lags do not fit.
  virtual Eigen::VectorXd one_step_residuals(const Eigen::Ref<const Eigen::VectorXd>& history) const;

  /// Deepest lag (as a positive count of extra samples) the model reads.
  int history_depth() const;

  virtual std::string describe() const = 0;
};

struct ForecastVector {
  Eigen::Index origin = 0;  // index of y_t in the history it was computed from
  Eigen::VectorXd values;   // yhat_{t+1|t} ... yhat_{t+J|t}
};

struct RecursionOptions {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

/// Clamp bounds matching a series kind: [0, 1500] for irradiance, [0, 1.5] for transmissivity.
RecursionOptions bounds_for(SeriesKind kind);

/// Value the lag at `offset` resolves to when predicting step `step` (1-based):
/// observed history if it reaches at or before t, otherwise an earlier forecast.
double resolve_lag(std::span<const double> history, std::span<const double> forecasts, int step, int offset);

/// Iterates the one-step model J times from the end of `history` (y_t is the
/// last element), feeding predictions back as pseudo-observations. Each step is
/// clamped to the option bounds before it is fed back. `residuals`, when given,
/// must align with `history`; otherwise the model computes them.
ForecastVector recursive_forecast(const TrainedModel& model, std::span<const double> history, int horizon,
                                  const RecursionOptions& options = {}, std::span<const double> residuals = {});

/// yhat_{t+1|t} = y_t.
class PersistenceModel final : public TrainedModel {
 public:
  const std::vector<int>& required_lags() const override { return lags_; }
  double predict_one(std::span<const double> lags, std::span<const double>) const override { return lags[0]; }
  std::string describe() const override { return "persistence"; }

 private:
  std::vector<int> lags_{0};
};

/// yhat_{t+1|t} = y_{t+1-s}; under recursion yhat_{t+j|t} = y_{t+j-s} for j <= s.
class SeasonalPersistenceModel final : public TrainedModel {
 public:
  explicit SeasonalPersistenceModel(int season);
  const std::vector<int>& required_lags() const override { return lags_; }
  double predict_one(std::span<const double> lags, std::span<const double>) const override { return lags[0]; }
  std::string describe() const override;

 private:
  int season_;
  std::vector<int> lags_;
};

double persistence_predict(std::span<const double> history);

/// y_{t+j-s}; RangeError when the history does not reach back s - j steps.
double seasonal_persistence_predict(std::span<const double> history, int step, int season);

/// Transmissivity persistence scaled by the extraterrestrial irradiance at each target.
Eigen::VectorXd reference_persistence_forecast(double tau_now, const Eigen::Ref<const Eigen::VectorXd>& extraterrestrial_ahead);

/// Same, from an irradiance history ending at t; the target instants follow the
/// series grid and the series location.
Eigen::VectorXd reference_persistence_forecast(const TimeSeries& irradiance_history, int horizon);

}  // namespace irradcast
