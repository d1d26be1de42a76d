#include "irradcast/evaluation.hpp"

#include <algorithm>

namespace irradcast {

double quantile_sorted(std::span<const double> sorted, double probability) {
  if (sorted.empty()) throw RangeError("quantile of empty data");
  const double pos = double(sorted.size() - 1) * probability;
  const auto lo = std::size_t(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - double(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BoxStats boxplot_stats(std::span<const double> values) {
  if (values.empty()) throw RangeError("box plot of empty data");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());

  BoxStats b;
  b.count = v.size();
  b.min = v.front();
  b.max = v.back();
  b.q1 = quantile_sorted(v, 0.25);
  b.median = quantile_sorted(v, 0.5);
  b.q3 = quantile_sorted(v, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;

  const auto first_in = std::lower_bound(v.begin(), v.end(), lo_fence);
  const auto last_in = std::upper_bound(v.begin(), v.end(), hi_fence);
  b.lower_whisker = *first_in;
  b.upper_whisker = *(last_in - 1);

  std::vector<double> outliers(v.begin(), first_in);
  outliers.insert(outliers.end(), last_in, v.end());
  b.outlier_count = outliers.size();
  for (std::size_t i = 0; i < outliers.size(); i += kOutlierStride) b.outliers.push_back(outliers[i]);
  return b;
}

ReferenceComparison compare_to_reference(const StepRmse& candidate, const StepRmse& reference) {
  if (candidate.size() != reference.size()) throw DimensionError("candidate and reference horizons differ");
  ReferenceComparison out;
  for (std::size_t j = 0; j < candidate.size(); ++j) {
    const bool ok = candidate[j] && reference[j] && *reference[j] != 0.0;
    out.incomparable.push_back(!ok);
    if (ok) {
      const double r = *candidate[j] / *reference[j];
      out.ratio.emplace_back(r);
      out.win.push_back(r < 1.0);
    } else {
      out.ratio.emplace_back(std::nullopt);
      out.win.push_back(false);
    }
  }
  return out;
}

}  // namespace irradcast
