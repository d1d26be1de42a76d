#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "irradcast/error.hpp"

namespace irradcast {

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// m forecast origins by J steps. `excluded(i, j)` removes a pair from scoring
/// (night target, missing observation, or a target past the end of the data).
struct ForecastMatrix {
  Eigen::MatrixXd forecasts;
  Eigen::MatrixXd actuals;
  BoolMatrix excluded;

  Eigen::Index origins() const { return forecasts.rows(); }
  Eigen::Index horizon() const { return forecasts.cols(); }
};

/// Per-step RMSE; an empty optional marks a step with no scored pair.
using StepRmse = std::vector<std::optional<double>>;

/// RMSE_j = sqrt(mean over non-excluded origins of (forecast - actual)^2).
template <typename DerivedF, typename DerivedA, typename DerivedM>
StepRmse rmse_per_step(const Eigen::DenseBase<DerivedF>& forecasts, const Eigen::DenseBase<DerivedA>& actuals,
                       const Eigen::DenseBase<DerivedM>& excluded) {
  if (forecasts.rows() != actuals.rows() || forecasts.cols() != actuals.cols() ||
      excluded.rows() != forecasts.rows() || excluded.cols() != forecasts.cols())
    throw DimensionError("forecast, actual and exclusion shapes differ");
  StepRmse out(std::size_t(forecasts.cols()));
  for (Eigen::Index j = 0; j < forecasts.cols(); ++j) {
    double sum = 0.0;
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < forecasts.rows(); ++i) {
      if (excluded(i, j)) continue;
      const double err = double(forecasts(i, j)) - double(actuals(i, j));
      sum += err * err;
      ++count;
    }
    if (count > 0) out[std::size_t(j)] = std::sqrt(sum / double(count));
  }
  return out;
}

inline StepRmse rmse_per_step(const ForecastMatrix& m) { return rmse_per_step(m.forecasts, m.actuals, m.excluded); }

/// Box-plot summary. Quartiles interpolate linearly between order statistics
/// (position (n - 1) p). Whiskers are the most extreme observed values within
/// 1.5 IQR of the box. Outliers are kept sorted ascending and thinned to every
/// 100th, starting with the smallest.
struct BoxStats {
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double lower_whisker = 0.0;
  double upper_whisker = 0.0;
  std::vector<double> outliers;  // thinned
  std::size_t outlier_count = 0;  // before thinning
};

inline constexpr std::size_t kOutlierStride = 100;

/// Quantile of sorted data by linear interpolation at (n - 1) p.
double quantile_sorted(std::span<const double> sorted, double probability);

/// Throws RangeError on empty input.
BoxStats boxplot_stats(std::span<const double> values);

struct ReferenceComparison {
  std::vector<std::optional<double>> ratio;  // candidate / reference; empty when incomparable
  std::vector<bool> win;                     // ratio < 1
  std::vector<bool> incomparable;            // reference zero or either side undefined
};

ReferenceComparison compare_to_reference(const StepRmse& candidate, const StepRmse& reference);

}  // namespace irradcast
