#include "irradcast/search.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace irradcast {
namespace {

constexpr int kTrainingDays[] = {1, 3, 7, 14, 21, 30, 60};
constexpr int kSeasonalTrainingDays[] = {14, 21, 30, 60};
constexpr double kThresholds[] = {0.01, 0.05, 0.1, 0.5, 1.0};
constexpr Preprocessing kPreprocessings[] = {Preprocessing::irradiance, Preprocessing::transmissivity};
constexpr NightPolicy::Mode kNightPolicies[] = {NightPolicy::Mode::all_day_and_night, NightPolicy::Mode::clock_window,
                                                NightPolicy::Mode::sun_above_horizon};
constexpr NightPolicy::Mode kSeasonalNightPolicies[] = {NightPolicy::Mode::all_day_and_night,
                                                        NightPolicy::Mode::clock_window};

std::vector<DataHyperparameters> data_grid(bool seasonal) {
  std::vector<DataHyperparameters> out;
  for (auto pre : kPreprocessings) {
    if (seasonal) {
      for (auto night : kSeasonalNightPolicies)
        for (int days : kSeasonalTrainingDays) out.push_back({pre, night, days});
    } else {
      for (auto night : kNightPolicies)
        for (int days : kTrainingDays) out.push_back({pre, night, days});
    }
  }
  return out;
}

std::vector<Neighborhood> neighborhoods() {
  std::vector<Neighborhood> out;
  for (int k = 1; k <= 20; ++k) out.emplace_back(FixedK{k});
  for (double eps : kThresholds) out.emplace_back(MaxDistance{eps});
  return out;
}

int parse_int(std::string_view key, std::string_view text) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError("'" + std::string(key) + "' expects an integer, got '" + std::string(text) + "'");
  return v;
}

double parse_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError("'" + std::string(key) + "' expects a number, got '" + std::string(text) + "'");
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Per-dataset quantities shared by every point.
struct PreparedDataset {
  const Dataset* dataset;
  SolarTrack track;
  Eigen::VectorXd irradiance;      // gaps filled
  Eigen::VectorXd transmissivity;  // gaps filled
  Mask all, clock, sun;

  explicit PreparedDataset(const Dataset& d) : dataset(&d) {
    const TimeSeries& s = d.series;
    if (s.step != kFifteenMinutes) throw ConfigError("dataset '" + d.id + "' is not a 15-min series");
    track = solar_track(s);
    irradiance = fill_gaps(s);
    transmissivity = fill_gaps(to_transmissivity(s, track));
    all = apply_night_policy(s, {NightPolicy::Mode::all_day_and_night}, track);
    clock = apply_night_policy(s, {NightPolicy::Mode::clock_window}, track);
    sun = apply_night_policy(s, {NightPolicy::Mode::sun_above_horizon}, track);
  }

  const Mask& policy_mask(NightPolicy::Mode m) const {
    switch (m) {
      case NightPolicy::Mode::clock_window: return clock;
      case NightPolicy::Mode::sun_above_horizon: return sun;
      default: return all;
    }
  }
};

std::unique_ptr<TrainedModel> fit_model(const HyperparameterPoint& point, const Eigen::Ref<const Eigen::VectorXd>& values,
                                        const Mask& include, std::chrono::duration<double> timeout) {
  switch (point.method) {
    case Method::persistence:
      return std::make_unique<PersistenceModel>();
    case Method::arima:
    case Method::sarima: {
      ArimaFitOptions opts;
      opts.timeout = timeout;
      return std::make_unique<ArimaModel>(fit_arima(values, include, std::get<ArimaSpec>(point.model), opts));
    }
    case Method::nnr:
    case Method::snnr:
      return std::make_unique<NnrModel>(nnr_fit(values, include, point.effective_nnr_spec()));
  }
  throw ConfigError("unknown method");
}

PointRun run_prepared(const PreparedDataset& prep, const HyperparameterPoint& point, const SearchConfig& config) {
  PointRun run;
  const TimeSeries& series = prep.dataset->series;
  const Eigen::Index n = series.size();
  const Eigen::Index per_day = series.samples_per_day();
  const Eigen::Index test_len = per_day * config.test_days;
  const Eigen::Index train_len = per_day * point.data.training_days;
  const int J = config.horizon;
  if (train_len + test_len > n) {
    run.status = Status::insufficient_data;
    return run;
  }
  const Eigen::Index offset = n - test_len - train_len;
  const Eigen::Index window = train_len + test_len;
  const bool tau = point.data.preprocessing == Preprocessing::transmissivity;
  const Eigen::VectorXd working = (tau ? prep.transmissivity : prep.irradiance).segment(offset, window);
  const Mask& policy = prep.policy_mask(point.data.night_policy);
  const Mask train_include = policy.segment(offset, train_len) && series.valid.segment(offset, train_len);

  std::unique_ptr<TrainedModel> model;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    model = fit_model(point, working.head(train_len), train_include, config.timeout);
  } catch (const UnstableModelError&) {
    run.status = Status::unstable_model;
  } catch (const TrainingTimeoutError&) {
    run.status = Status::training_timeout;
  } catch (const RangeError&) {
    run.status = Status::insufficient_data;
  }
  if (config.record_timing)
    run.fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (run.status != Status::ok) return run;

  const Eigen::VectorXd residuals =
      model->residual_lags().empty() ? Eigen::VectorXd() : model->one_step_residuals(working);
  const RecursionOptions bounds = bounds_for(tau ? SeriesKind::transmissivity : SeriesKind::irradiance);

  std::vector<Eigen::VectorXd> rows_f, rows_a;
  std::vector<Eigen::Array<bool, Eigen::Dynamic, 1>> rows_x;
  for (Eigen::Index t = std::max<Eigen::Index>(train_len, model->history_depth()); t < window; ++t) {
    const Eigen::Index g = offset + t;
    if (!policy[g] || !series.valid[g]) continue;
    Eigen::Array<bool, Eigen::Dynamic, 1> excluded(J);
    Eigen::VectorXd actual(J);
    for (int j = 1; j <= J; ++j) {
      const Eigen::Index target = g + j;
      const bool scored = target < n && prep.track.daytime[target] && series.valid[target];
      excluded[j - 1] = !scored;
      actual[j - 1] = target < n ? series.values[target] : 0.0;
    }
    if (excluded.all()) continue;  // contributes to no step

    ForecastVector fc;
    try {
      std::span<const double> res;
      if (residuals.size() > 0) res = std::span<const double>(residuals.data(), std::size_t(t + 1));
      fc = recursive_forecast(*model, std::span<const double>(working.data(), std::size_t(t + 1)), J, bounds, res);
    } catch (const EmptyNeighborhoodError&) {
      ++run.failed_origins;
      continue;
    }
    Eigen::VectorXd forecast = fc.values;
    if (tau) {
      Eigen::VectorXd ie(J);
      for (int j = 1; j <= J; ++j) ie[j - 1] = g + j < n ? prep.track.extraterrestrial[g + j] : 0.0;
      forecast = from_transmissivity(forecast, ie);
    }
    rows_f.push_back(std::move(forecast));
    rows_a.push_back(std::move(actual));
    rows_x.push_back(std::move(excluded));
    run.origins.push_back(g);
  }

  const Eigen::Index m = Eigen::Index(rows_f.size());
  run.matrix.forecasts.resize(m, J);
  run.matrix.actuals.resize(m, J);
  run.matrix.excluded.resize(m, J);
  for (Eigen::Index i = 0; i < m; ++i) {
    run.matrix.forecasts.row(i) = rows_f[std::size_t(i)].transpose();
    run.matrix.actuals.row(i) = rows_a[std::size_t(i)].transpose();
    run.matrix.excluded.row(i) = rows_x[std::size_t(i)].transpose();
  }
  return run;
}

EvaluationRecord to_record(const Dataset& d, const HyperparameterPoint& point, const PointRun& run, int horizon) {
  EvaluationRecord rec;
  rec.dataset_id = d.id;
  rec.point = point;
  rec.fit_seconds = run.fit_seconds;
  rec.status = run.status;
  rec.rmse.assign(std::size_t(horizon), std::nullopt);
  if (run.status != Status::ok) return rec;
  rec.forecast_count = std::size_t(run.matrix.origins());
  rec.rmse = rmse_per_step(run.matrix);
  const bool complete = std::all_of(rec.rmse.begin(), rec.rmse.end(), [](const auto& r) { return r.has_value(); });
  if (!complete) {
    // Steps without scored pairs: blame the neighborhood when origins failed, else the data.
    rec.status = run.failed_origins > 0 ? Status::empty_neighborhood : Status::insufficient_data;
    rec.rmse.assign(std::size_t(horizon), std::nullopt);
  }
  return rec;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::persistence: return "persistence";
    case Method::arima: return "arima";
    case Method::sarima: return "sarima";
    case Method::nnr: return "nnr";
    case Method::snnr: return "snnr";
  }
  return "?";
}

std::string_view to_string(Preprocessing p) {
  return p == Preprocessing::irradiance ? "irradiance" : "transmissivity";
}

std::string_view to_string(NightPolicy::Mode m) {
  switch (m) {
    case NightPolicy::Mode::all_day_and_night: return "all";
    case NightPolicy::Mode::clock_window: return "clock";
    case NightPolicy::Mode::sun_above_horizon: return "sun";
  }
  return "?";
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::ok: return "ok";
    case Status::unstable_model: return "unstable_model";
    case Status::training_timeout: return "training_timeout";
    case Status::empty_neighborhood: return "empty_neighborhood";
    case Status::insufficient_data: return "insufficient_data";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  for (auto m : {Method::persistence, Method::arima, Method::sarima, Method::nnr, Method::snnr})
    if (to_string(m) == text) return m;
  throw ConfigError("unknown method '" + std::string(text) + "'");
}

Preprocessing parse_preprocessing(std::string_view text) {
  for (auto p : kPreprocessings)
    if (to_string(p) == text) return p;
  throw ConfigError("unknown preprocessing '" + std::string(text) + "'");
}

NightPolicy::Mode parse_night_policy(std::string_view text) {
  for (auto m : kNightPolicies)
    if (to_string(m) == text) return m;
  throw ConfigError("unknown night policy '" + std::string(text) + "'");
}

Status parse_status(std::string_view text) {
  for (auto s : {Status::ok, Status::unstable_model, Status::training_timeout, Status::empty_neighborhood,
                 Status::insufficient_data})
    if (to_string(s) == text) return s;
  throw ConfigError("unknown status '" + std::string(text) + "'");
}

void HyperparameterPoint::validate() const {
  if (data.training_days < 1) throw ConfigError("training_days must be >= 1");
  switch (method) {
    case Method::persistence:
      if (!std::holds_alternative<std::monostate>(model)) throw ConfigError("persistence takes no model structure");
      break;
    case Method::arima:
    case Method::sarima: {
      const auto* spec = std::get_if<ArimaSpec>(&model);
      if (!spec) throw ConfigError("ARIMA point without an ARIMA structure");
      try {
        spec->validate();
      } catch (const RangeError& e) {
        throw ConfigError(e.what());
      }
      if (method == Method::arima && spec->s != 0) throw ConfigError("non-seasonal ARIMA with seasonal orders");
      break;
    }
    case Method::nnr:
    case Method::snnr: {
      const auto* spec = std::get_if<NnrSpec>(&model);
      if (!spec) throw ConfigError("NNR point without an NNR structure");
      try {
        spec->validate();
      } catch (const RangeError& e) {
        throw ConfigError(e.what());
      }
      if ((method == Method::snnr) != (spec->P > 0)) throw ConfigError("seasonal NNR needs P >= 1, plain NNR P = 0");
      break;
    }
  }
  if (seasonal()) {
    if (data.training_days < 14) throw ConfigError("seasonal models need at least 14 training days");
    if (data.night_policy == NightPolicy::Mode::sun_above_horizon)
      throw ConfigError("seasonal models cannot drop night data by solar position (variable day length)");
  }
}

NnrSpec HyperparameterPoint::effective_nnr_spec() const {
  NnrSpec spec = std::get<NnrSpec>(model);
  if (auto* md = std::get_if<MaxDistance>(&spec.neighborhood); md && data.preprocessing == Preprocessing::irradiance)
    md->epsilon *= kSolarConstant;
  return spec;
}

HyperparameterPoint parse_point(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("malformed point token '" + token + "'");
    if (!kv.emplace(token.substr(0, eq), token.substr(eq + 1)).second)
      throw ConfigError("duplicate key '" + token.substr(0, eq) + "'");
  }
  auto take = [&](const char* key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto take_int = [&](const char* key, int fallback) {
    const auto v = take(key);
    return v ? parse_int(key, *v) : fallback;
  };

  HyperparameterPoint point;
  const auto method = take("method");
  if (!method) throw ConfigError("point lacks 'method'");
  point.method = parse_method(*method);
  if (auto v = take("pre")) point.data.preprocessing = parse_preprocessing(*v);
  if (auto v = take("night")) point.data.night_policy = parse_night_policy(*v);
  point.data.training_days = take_int("days", 60);

  switch (point.method) {
    case Method::persistence:
      break;
    case Method::arima:
    case Method::sarima: {
      ArimaSpec spec;
      spec.p = take_int("p", 0);
      spec.d = take_int("d", 0);
      spec.q = take_int("q", 0);
      spec.P = take_int("P", 0);
      spec.D = take_int("D", 0);
      spec.Q = take_int("Q", 0);
      spec.s = (spec.P || spec.D || spec.Q) ? kDailySeason : 0;
      point.model = spec;
      break;
    }
    case Method::nnr:
    case Method::snnr: {
      NnrSpec spec;
      spec.p = take_int("p", 1);
      spec.P = take_int("P", point.method == Method::snnr ? 1 : 0);
      spec.s = spec.P > 0 ? kDailySeason : 0;
      const auto k = take("k");
      const auto eps = take("eps");
      if (k && eps) throw ConfigError("give either k or eps, not both");
      if (eps) spec.neighborhood = MaxDistance{parse_double("eps", *eps)};
      else spec.neighborhood = FixedK{k ? parse_int("k", *k) : 10};
      if (auto w = take("weight")) {
        if (*w == "uniform") spec.weight = WeightMode::uniform;
        else if (*w == "inverse") spec.weight = WeightMode::inverse_distance;
        else throw ConfigError("unknown weight '" + *w + "'");
      }
      point.model = spec;
      break;
    }
  }
  if (!kv.empty()) throw ConfigError("unknown point key '" + kv.begin()->first + "'");
  point.validate();
  return point;
}

std::string format_point(const HyperparameterPoint& point) {
  std::string out = "method=" + std::string(to_string(point.method));
  if (const auto* a = std::get_if<ArimaSpec>(&point.model)) {
    out += " p=" + std::to_string(a->p) + " d=" + std::to_string(a->d) + " q=" + std::to_string(a->q);
    if (point.method == Method::sarima)
      out += " P=" + std::to_string(a->P) + " D=" + std::to_string(a->D) + " Q=" + std::to_string(a->Q);
  } else if (const auto* n = std::get_if<NnrSpec>(&point.model)) {
    out += " p=" + std::to_string(n->p);
    if (point.method == Method::snnr) out += " P=" + std::to_string(n->P);
    if (const auto* fk = std::get_if<FixedK>(&n->neighborhood)) out += " k=" + std::to_string(fk->k);
    else {
      out += " eps=" + format_double(std::get<MaxDistance>(n->neighborhood).epsilon);
    }
    out += n->weight == WeightMode::uniform ? " weight=uniform" : " weight=inverse";
  }
  out += " pre=" + std::string(to_string(point.data.preprocessing));
  out += " night=" + std::string(to_string(point.data.night_policy));
  out += " days=" + std::to_string(point.data.training_days);
  return out;
}

HyperparameterPoint reference_point() {
  HyperparameterPoint p;
  p.method = Method::persistence;
  p.data = {Preprocessing::transmissivity, NightPolicy::Mode::all_day_and_night, 1};
  return p;
}

std::map<Method, std::size_t> count_structures(const std::vector<HyperparameterPoint>& grid) {
  // A structure is a point with its data settings blanked; the text form is a lossless key.
  std::set<std::string> seen;
  std::map<Method, std::size_t> out;
  for (const auto& pt : grid) {
    HyperparameterPoint structure = pt;
    structure.data = DataHyperparameters{};
    if (seen.insert(format_point(structure)).second) ++out[pt.method];
  }
  return out;
}

std::vector<HyperparameterPoint> enumerate_full_grid() {
  std::vector<HyperparameterPoint> grid;
  for (auto pre : kPreprocessings) {
    HyperparameterPoint pt;
    pt.method = Method::persistence;
    pt.data = {pre, NightPolicy::Mode::all_day_and_night, 1};
    grid.push_back(pt);
  }

  const auto plain = data_grid(false);
  const auto seasonal = data_grid(true);
  auto emit = [&](Method method, auto model, const std::vector<DataHyperparameters>& data) {
    for (const auto& dh : data) {
      HyperparameterPoint pt;
      pt.method = method;
      pt.model = model;
      pt.data = dh;
      grid.push_back(pt);
    }
  };

  for (int p = 0; p <= 10; ++p)
    for (int q = 0; q <= 10; ++q)
      for (int d = 0; d <= 2; ++d) emit(Method::arima, ArimaSpec{p, d, q, 0, 0, 0, 0, true}, plain);

  for (int p = 1; p <= 20; ++p)
    for (auto w : {WeightMode::uniform, WeightMode::inverse_distance})
      for (const auto& nb : neighborhoods()) {
        NnrSpec spec;
        spec.p = p;
        spec.weight = w;
        spec.neighborhood = nb;
        emit(Method::nnr, spec, plain);
      }

  for (int p : {0, 1, 3})
    for (int q : {0, 1, 3})
      for (int P = 0; P <= 3; ++P)
        for (int Q = 0; Q <= 3; ++Q)
          for (int d = 0; d <= 1; ++d)
            for (int D = 0; D <= 1; ++D) {
              const int s = (P || D || Q) ? kDailySeason : 0;
              emit(Method::sarima, ArimaSpec{p, d, q, P, D, Q, s, true}, seasonal);
            }

  for (int p = 1; p <= 11; ++p)
    for (int P = 1; P <= 7; ++P)
      for (auto w : {WeightMode::uniform, WeightMode::inverse_distance})
        for (const auto& nb : neighborhoods()) {
          NnrSpec spec;
          spec.p = p;
          spec.P = P;
          spec.s = kDailySeason;
          spec.weight = w;
          spec.neighborhood = nb;
          emit(Method::snnr, spec, seasonal);
        }
  return grid;
}

std::vector<HyperparameterPoint> enumerate_reduced_grid() {
  std::vector<HyperparameterPoint> grid;
  grid.reserve(847);
  for (int p = 1; p <= 11; ++p)
    for (int P = 1; P <= 7; ++P)
      for (int k = 10; k <= 20; ++k) {
        NnrSpec spec;
        spec.p = p;
        spec.P = P;
        spec.s = kDailySeason;
        spec.weight = WeightMode::uniform;
        spec.neighborhood = FixedK{k};
        HyperparameterPoint pt;
        pt.method = Method::snnr;
        pt.model = spec;
        pt.data = {Preprocessing::transmissivity, NightPolicy::Mode::all_day_and_night, 60};
        grid.push_back(pt);
      }
  return grid;
}

PointRun run_point(const Dataset& dataset, const HyperparameterPoint& point, const SearchConfig& config) {
  point.validate();
  const PreparedDataset prep(dataset);
  return run_prepared(prep, point, config);
}

Eigen::VectorXd forecast_from(const Dataset& dataset, const HyperparameterPoint& point, Eigen::Index origin,
                              int horizon, std::chrono::duration<double> timeout) {
  point.validate();
  if (horizon < 1) throw RangeError("horizon must be >= 1");
  const PreparedDataset prep(dataset);
  const TimeSeries& series = dataset.series;
  const Eigen::Index train_len = series.samples_per_day() * point.data.training_days;
  const Eigen::Index earliest = train_len - 1;
  if (origin < earliest || origin >= series.size()) {
    const std::string first = earliest < series.size() ? format_iso8601(series.time_at(earliest)) : "none";
    throw RangeError("origin outside the feasible range; earliest feasible origin is " + first + ", latest " +
                     format_iso8601(series.time_at(series.size() - 1)));
  }
  const bool tau = point.data.preprocessing == Preprocessing::transmissivity;
  const Eigen::Index offset = origin + 1 - train_len;
  const Eigen::VectorXd working = (tau ? prep.transmissivity : prep.irradiance).segment(offset, train_len);
  const Mask include =
      prep.policy_mask(point.data.night_policy).segment(offset, train_len) && series.valid.segment(offset, train_len);
  const auto model = fit_model(point, working, include, timeout);
  if (model->history_depth() >= train_len)
    throw RangeError("training window shorter than the model's lag depth");
  const ForecastVector fc =
      recursive_forecast(*model, std::span<const double>(working.data(), std::size_t(working.size())), horizon,
                         bounds_for(tau ? SeriesKind::transmissivity : SeriesKind::irradiance));
  if (!tau) return fc.values;
  Eigen::VectorXd ie(horizon);
  for (int j = 1; j <= horizon; ++j)
    ie[j - 1] = extraterrestrial_irradiance(series.location, series.solar_instant(origin + j));
  return from_transmissivity(fc.values, ie);
}

std::vector<EvaluationRecord> run_search(const std::vector<Dataset>& datasets,
                                         const std::vector<HyperparameterPoint>& grid, const SearchConfig& config) {
  if (config.horizon < 1) throw ConfigError("horizon must be >= 1");
  if (config.test_days < 1) throw ConfigError("test_days must be >= 1");
  for (const auto& pt : grid) pt.validate();

  std::vector<PreparedDataset> prepared;
  prepared.reserve(datasets.size());
  for (const auto& d : datasets) prepared.emplace_back(d);

  std::vector<std::size_t> order(grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return grid[a].method < grid[b].method; });

  const std::size_t total = datasets.size() * grid.size();
  std::vector<EvaluationRecord> records(total);
  std::atomic<std::size_t> next{0}, done{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    while (true) {
      const std::size_t task = next.fetch_add(1);
      if (task >= total) return;
      const std::size_t di = task / grid.size();
      const HyperparameterPoint& point = grid[order[task % grid.size()]];
      try {
        const PointRun run = run_prepared(prepared[di], point, config);
        records[task] = to_record(datasets[di], point, run, config.horizon);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = total;
        return;
      }
      const std::size_t finished = done.fetch_add(1) + 1;
      if (config.progress) config.progress(finished, total);
    }
  };

  const int workers = std::max(1, config.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

}  // namespace irradcast

namespace irradcast {
namespace {

constexpr std::pair<GroupBy, std::string_view> kGroupNames[] = {
    {GroupBy::method, "method"},       {GroupBy::preprocessing, "preprocessing"},
    {GroupBy::night_policy, "night_policy"}, {GroupBy::training_days, "training_days"},
    {GroupBy::p, "p"},                 {GroupBy::P, "P"},
    {GroupBy::weight, "weight"},       {GroupBy::neighborhood, "neighborhood"},
    {GroupBy::k, "k"}};

// (ordinal, label) of a record's group, or nothing when the dimension does not apply.
std::optional<std::pair<int, std::string>> group_of(const HyperparameterPoint& pt, GroupBy g) {
  const auto* arima = std::get_if<ArimaSpec>(&pt.model);
  const auto* nnr = std::get_if<NnrSpec>(&pt.model);
  auto numeric = [](int v) { return std::make_optional(std::make_pair(v, std::to_string(v))); };
  switch (g) {
    case GroupBy::method: return std::make_pair(int(pt.method), std::string(to_string(pt.method)));
    case GroupBy::preprocessing:
      return std::make_pair(int(pt.data.preprocessing), std::string(to_string(pt.data.preprocessing)));
    case GroupBy::night_policy:
      return std::make_pair(int(pt.data.night_policy), std::string(to_string(pt.data.night_policy)));
    case GroupBy::training_days: return numeric(pt.data.training_days);
    case GroupBy::p:
      if (arima) return numeric(arima->p);
      if (nnr) return numeric(nnr->p);
      return std::nullopt;
    case GroupBy::P:
      if (!pt.seasonal()) return std::nullopt;
      return numeric(arima ? arima->P : nnr->P);
    case GroupBy::weight:
      if (!nnr) return std::nullopt;
      return std::make_pair(int(nnr->weight), std::string(nnr->weight == WeightMode::uniform ? "uniform" : "inverse"));
    case GroupBy::neighborhood:
      if (!nnr) return std::nullopt;
      if (std::holds_alternative<FixedK>(nnr->neighborhood)) return std::make_pair(0, std::string("k"));
      return std::make_pair(1, std::string("epsilon"));
    case GroupBy::k:
      if (!nnr) return std::nullopt;
      if (const auto* fk = std::get_if<FixedK>(&nnr->neighborhood)) return numeric(fk->k);
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

GroupBy parse_group_by(std::string_view text) {
  for (const auto& [g, name] : kGroupNames)
    if (name == text) return g;
  throw ConfigError("unknown group-by dimension '" + std::string(text) + "'");
}

std::string_view to_string(GroupBy g) {
  for (const auto& [v, name] : kGroupNames)
    if (v == g) return name;
  return "?";
}

Summary summarize(const std::vector<EvaluationRecord>& records, GroupBy group_by, const std::vector<int>& steps) {
  struct Group {
    std::size_t members = 0;
    std::vector<const EvaluationRecord*> usable;
  };
  std::map<std::pair<int, std::string>, Group> groups;
  for (const auto& rec : records) {
    const auto key = group_of(rec.point, group_by);
    if (!key) continue;
    Group& g = groups[*key];
    ++g.members;
    if (rec.status == Status::ok) g.usable.push_back(&rec);
  }

  Summary out;
  for (const auto& [key, group] : groups) {
    if (group.usable.empty()) {
      out.notices.push_back("group '" + key.second + "' omitted: none of its " + std::to_string(group.members) +
                            " records has status ok");
      continue;
    }
    for (int step : steps) {
      std::vector<double> values;
      values.reserve(group.usable.size());
      for (const auto* rec : group.usable)
        if (step >= 1 && std::size_t(step) <= rec->rmse.size() && rec->rmse[std::size_t(step - 1)])
          values.push_back(*rec->rmse[std::size_t(step - 1)]);
      if (values.empty()) {
        out.notices.push_back("group '" + key.second + "' step " + std::to_string(step) + " omitted: no RMSE values");
        continue;
      }
      out.rows.push_back({key.second, step, boxplot_stats(values)});
    }
  }
  return out;
}

void write_summary(std::ostream& out, const Summary& summary) {
  out << "group_key,step_j,count,min,q1,median,q3,lower_whisker,upper_whisker,outlier_count\n";
  char buf[512];
  for (const auto& row : summary.rows) {
    const BoxStats& b = row.stats;
    std::snprintf(buf, sizeof buf, "%s,%d,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%zu\n", row.group_key.c_str(),
                  row.step, b.count, b.min, b.q1, b.median, b.q3, b.lower_whisker, b.upper_whisker, b.outlier_count);
    out << buf;
  }
}

void write_summary(const std::string& path, const Summary& summary) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_summary(out, summary);
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace irradcast
