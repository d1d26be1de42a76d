#pragma once

#include <chrono>
#include <functional>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "irradcast/arima.hpp"
#include "irradcast/evaluation.hpp"
#include "irradcast/nnr.hpp"
#include "irradcast/time_series.hpp"

namespace irradcast {

enum class Method { persistence, arima, sarima, nnr, snnr };
enum class Preprocessing { irradiance, transmissivity };

/// Season length in 15-min steps (one day).
inline constexpr int kDailySeason = 96;
inline constexpr int kDefaultHorizon = 12;

struct DataHyperparameters {
  Preprocessing preprocessing = Preprocessing::transmissivity;
  NightPolicy::Mode night_policy = NightPolicy::Mode::all_day_and_night;
  int training_days = 60;
  bool operator==(const DataHyperparameters&) const = default;
};

/// One trainable configuration. Persistence on transmissivity is the
/// clear-sky-scaled reference forecaster.
struct HyperparameterPoint {
  Method method = Method::persistence;
  std::variant<std::monostate, ArimaSpec, NnrSpec> model;
  DataHyperparameters data;

  bool seasonal() const { return method == Method::sarima || method == Method::snnr; }
  /// Throws ConfigError when the combination is inadmissible.
  void validate() const;
  /// NNR structure with the distance threshold rescaled by the solar constant
  /// for irradiance data.
  NnrSpec effective_nnr_spec() const;
  bool operator==(const HyperparameterPoint&) const = default;
};

/// `method=snnr p=3 P=2 k=12 weight=uniform pre=transmissivity night=all days=60`.
/// Omitted data keys default to transmissivity, all, 60.
HyperparameterPoint parse_point(std::string_view text);
std::string format_point(const HyperparameterPoint& point);

HyperparameterPoint reference_point();

std::string_view to_string(Method m);
std::string_view to_string(Preprocessing p);
std::string_view to_string(NightPolicy::Mode m);
Method parse_method(std::string_view text);
Preprocessing parse_preprocessing(std::string_view text);
NightPolicy::Mode parse_night_policy(std::string_view text);

/// Model-structure counts of a grid, per method.
std::map<Method, std::size_t> count_structures(const std::vector<HyperparameterPoint>& grid);

/// Every admissible point: method structures crossed with their data
/// hyperparameters, ordered by method then structure then data.
std::vector<HyperparameterPoint> enumerate_full_grid();

/// Seasonal NNR on transmissivity with night data, 60 days, uniform weights,
/// k = 10..20, p = 1..11, P = 1..7.
std::vector<HyperparameterPoint> enumerate_reduced_grid();

enum class Status { ok, unstable_model, training_timeout, empty_neighborhood, insufficient_data };
std::string_view to_string(Status s);
Status parse_status(std::string_view text);

struct EvaluationRecord {
  std::string dataset_id;
  HyperparameterPoint point;
  StepRmse rmse;
  Status status = Status::ok;
  std::optional<double> fit_seconds;
  std::size_t forecast_count = 0;
  bool operator==(const EvaluationRecord&) const = default;
};

struct Dataset {
  std::string id;
  TimeSeries series;  // 15-min irradiance
};

struct SearchConfig {
  int horizon = kDefaultHorizon;
  int test_days = 7;
  std::chrono::duration<double> timeout{60.0};
  int workers = 1;
  bool record_timing = false;  // wall-clock fit times make output non-reproducible
  /// Called from worker threads after each finished task (done, total).
  std::function<void(std::size_t, std::size_t)> progress;
};

/// Forecasts and scoring inputs for one point on one dataset. Exposed for the
/// CLI and for tests that rebuild a record by hand.
struct PointRun {
  Status status = Status::ok;
  std::optional<double> fit_seconds;
  ForecastMatrix matrix;
  std::vector<Eigen::Index> origins;  // indices into the dataset series
  std::size_t failed_origins = 0;
};

PointRun run_point(const Dataset& dataset, const HyperparameterPoint& point, const SearchConfig& config);

/// Trains `point` on the `training_days` ending at sample `origin` (inclusive)
/// and forecasts the following `horizon` samples in irradiance units. Throws
/// RangeError naming the earliest feasible origin when history is short.
Eigen::VectorXd forecast_from(const Dataset& dataset, const HyperparameterPoint& point, Eigen::Index origin,
                              int horizon = kDefaultHorizon,
                              std::chrono::duration<double> timeout = std::chrono::duration<double>(60.0));

/// Evaluates every (dataset, point) pair on a worker pool. Per-point failures
/// become record statuses; output order is dataset, method, grid position and
/// does not depend on the worker count.
std::vector<EvaluationRecord> run_search(const std::vector<Dataset>& datasets,
                                         const std::vector<HyperparameterPoint>& grid, const SearchConfig& config);

/// Results CSV (see `results_header`). Undefined RMSE steps and inapplicable
/// fields are empty cells.
void persist_results(std::ostream& out, const std::vector<EvaluationRecord>& records, int horizon = kDefaultHorizon);
void persist_results(const std::string& path, const std::vector<EvaluationRecord>& records,
                     int horizon = kDefaultHorizon);
/// Throws ParseError naming the offending row.
std::vector<EvaluationRecord> load_results(std::istream& in);
std::vector<EvaluationRecord> load_results(const std::string& path);
std::string results_header(int horizon);

enum class GroupBy { method, preprocessing, night_policy, training_days, p, P, weight, neighborhood, k };
GroupBy parse_group_by(std::string_view text);
std::string_view to_string(GroupBy g);

struct SummaryRow {
  std::string group_key;
  int step = 1;
  BoxStats stats;
};

struct Summary {
  std::vector<SummaryRow> rows;
  std::vector<std::string> notices;  // groups omitted for lack of usable records
};

inline const std::vector<int> kSummarySteps{1, 4, 12};

/// Box statistics of RMSE_j per group for each requested step. Only records
/// with status ok enter the statistics; records the dimension does not apply
/// to are skipped.
Summary summarize(const std::vector<EvaluationRecord>& records, GroupBy group_by,
                  const std::vector<int>& steps = kSummarySteps);

void write_summary(std::ostream& out, const Summary& summary);
void write_summary(const std::string& path, const Summary& summary);

}  // namespace irradcast
