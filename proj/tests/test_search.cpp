#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "irradcast/error.hpp"
#include "irradcast/search.hpp"
#include "irradcast/synth.hpp"
#include "test_support.hpp"

using namespace irradcast;

namespace {

Dataset synthetic_dataset(int days, std::uint64_t seed = 3) {
  SynthSpec spec;
  spec.days = days;
  spec.seed = seed;
  spec.step = kFifteenMinutes;
  return {"syn", synthesize(spec).series};
}

std::string csv_of(const std::vector<EvaluationRecord>& records) {
  std::ostringstream out;
  persist_results(out, records);
  return out.str();
}

EvaluationRecord random_record(std::mt19937_64& rng, const std::vector<HyperparameterPoint>& grid) {
  std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
  std::uniform_real_distribution<double> u(0.0, 300.0);
  EvaluationRecord r;
  r.dataset_id = "site-" + std::to_string(pick(rng) % 9);
  r.point = grid[pick(rng)];
  r.forecast_count = pick(rng) % 700;
  const int kind = int(pick(rng) % 4);
  r.status = kind == 0 ? Status::unstable_model : Status::ok;
  for (int j = 0; j < kDefaultHorizon; ++j) r.rmse.push_back(r.status == Status::ok ? std::optional(u(rng)) : std::nullopt);
  if (kind == 3) r.fit_seconds = u(rng) / 1000.0;
  return r;
}

}  // namespace

TEST_SUITE("search") {

TEST_CASE("full grid structure counts") {
  const auto grid = enumerate_full_grid();
  const auto counts = count_structures(grid);
  CHECK(counts.at(Method::arima) == 11 * 11 * 3);
  CHECK(counts.at(Method::nnr) == 20 * 2 * (20 + 5));
  CHECK(counts.at(Method::sarima) == 3 * 3 * 4 * 4 * 2 * 2);
  CHECK(counts.at(Method::snnr) == 11 * 7 * 2 * 25);
  // Non-seasonal structures cross 2 x 3 x 7 data settings, seasonal ones 2 x 2 x 4.
  CHECK(grid.size() == 2 + (363 + 1000) * 42 + (576 + 3850) * 16);
  for (const auto& pt : grid) CHECK_NOTHROW(pt.validate());
}

TEST_CASE("grid enumeration is deterministic and duplicate-free") {
  const auto a = enumerate_full_grid();
  CHECK(a == enumerate_full_grid());
  std::set<std::string> seen;
  for (const auto& pt : a) seen.insert(format_point(pt));
  CHECK(seen.size() == a.size());
}

TEST_CASE("reduced grid") {
  const auto reduced = enumerate_reduced_grid();
  CHECK(reduced.size() == 847);
  CHECK(reduced.size() < 1000);
  std::set<std::string> full_structures;
  for (const auto& pt : enumerate_full_grid())
    if (pt.method == Method::snnr) {
      HyperparameterPoint projected = pt;
      projected.data = {};
      full_structures.insert(format_point(projected));
    }
  for (const auto& pt : reduced) {
    CHECK(pt.method == Method::snnr);
    CHECK(pt.data.preprocessing == Preprocessing::transmissivity);
    CHECK(pt.data.night_policy == NightPolicy::Mode::all_day_and_night);
    CHECK(pt.data.training_days == 60);
    HyperparameterPoint projected = pt;
    projected.data = {};
    CHECK(full_structures.count(format_point(projected)) == 1);
  }
}

TEST_CASE("point text round trip and validation") {
  const auto grid = enumerate_full_grid();
  for (std::size_t i = 0; i < grid.size(); i += 97) CHECK(parse_point(format_point(grid[i])) == grid[i]);
  const auto p = parse_point("method=snnr p=3 P=2 k=12 weight=uniform");
  CHECK(p.data.training_days == 60);
  CHECK(std::get<NnrSpec>(p.model).s == kDailySeason);
  CHECK_THROWS_AS(parse_point("method=snnr p=3 P=2 k=12 days=7"), ConfigError);
  CHECK_THROWS_AS(parse_point("method=snnr p=3 P=2 k=12 night=sun"), ConfigError);
  CHECK_THROWS_AS(parse_point("method=sarima p=1 P=1 night=sun days=14"), ConfigError);
  CHECK_THROWS_AS(parse_point("method=nnr p=3 k=2 eps=0.1"), ConfigError);
  CHECK_THROWS_AS(parse_point("method=nnr p=3 color=blue"), ConfigError);
  CHECK_THROWS_AS(parse_point("p=3"), ConfigError);
  CHECK_NOTHROW(parse_point("method=sarima p=1 d=0 q=1 P=0 D=0 Q=0"));
}

TEST_CASE("distance thresholds scale with the solar constant on irradiance") {
  auto p = parse_point("method=nnr p=2 eps=0.05 pre=irradiance");
  CHECK(std::get<MaxDistance>(p.effective_nnr_spec().neighborhood).epsilon == doctest::Approx(0.05 * 1360.8));
  p.data.preprocessing = Preprocessing::transmissivity;
  CHECK(std::get<MaxDistance>(p.effective_nnr_spec().neighborhood).epsilon == 0.05);
}

TEST_CASE("persistence record equals a hand-rolled evaluation") {
  const Dataset ds = synthetic_dataset(9);
  const TimeSeries& s = ds.series;
  const SolarTrack track = solar_track(s);
  const Eigen::Index n = s.size(), test_start = n - 7 * 96;

  for (auto pre : {Preprocessing::irradiance, Preprocessing::transmissivity}) {
    HyperparameterPoint pt;
    pt.method = Method::persistence;
    pt.data = {pre, NightPolicy::Mode::all_day_and_night, 1};
    const auto records = run_search({ds}, {pt}, SearchConfig{});
    REQUIRE(records.size() == 1);
    const EvaluationRecord& rec = records[0];
    CHECK(rec.status == Status::ok);

    std::vector<double> sse(12, 0.0);
    std::vector<int> count(12, 0);
    std::size_t origins = 0;
    for (Eigen::Index t = test_start; t < n; ++t) {
      bool any = false;
      for (int j = 1; j <= 12; ++j) {
        const Eigen::Index target = t + j;
        if (target >= n || !track.daytime[target]) continue;
        double f = s.values[t];
        if (pre == Preprocessing::transmissivity) {
          const double ie_t = track.extraterrestrial[t];
          const double tau = ie_t >= 1.0 ? std::min(s.values[t] / ie_t, 1.5) : 0.0;
          f = tau * track.extraterrestrial[target];
        }
        sse[std::size_t(j - 1)] += (f - s.values[target]) * (f - s.values[target]);
        ++count[std::size_t(j - 1)];
        any = true;
      }
      origins += any ? 1 : 0;
    }
    CHECK(rec.forecast_count == origins);
    for (int j = 0; j < 12; ++j) CHECK(*rec.rmse[std::size_t(j)] == doctest::Approx(std::sqrt(sse[std::size_t(j)] / count[std::size_t(j)])).epsilon(1e-12));
  }
}

TEST_CASE("explosive training data yields an unstable ARIMA") {
  const GeoLocation loc{39.74, -105.18, 1829.0, -420};
  Eigen::VectorXd v(8 * 96);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = i < 96 ? std::pow(1.05, double(i)) : 100.0;
  const Dataset ds{"boom", make_series(testing_support::at("2020-06-01T00:00:00Z"), kFifteenMinutes, v, loc)};
  const auto pt = parse_point("method=arima p=1 d=0 q=0 pre=irradiance night=all days=1");
  const auto records = run_search({ds}, {pt}, SearchConfig{});
  CHECK(records[0].status == Status::unstable_model);
  for (const auto& r : records[0].rmse) CHECK_FALSE(r.has_value());
}

TEST_CASE("insufficient data and empty neighborhoods are recorded, not thrown") {
  const Dataset ds = synthetic_dataset(9);
  const auto long_train = parse_point("method=nnr p=2 k=5 weight=uniform days=30");
  const auto tiny_eps = parse_point("method=nnr p=20 eps=0.01 weight=uniform pre=irradiance night=sun days=1");
  const auto records = run_search({ds}, {long_train, tiny_eps}, SearchConfig{});
  REQUIRE(records.size() == 2);
  CHECK(records[0].status == Status::insufficient_data);
  CHECK(records[1].status == Status::empty_neighborhood);
}

TEST_CASE("results do not depend on the worker count") {
  const Dataset a = synthetic_dataset(16, 1), b = synthetic_dataset(16, 2);
  const std::vector<Dataset> datasets{{"a", a.series}, {"b", b.series}};
  std::vector<HyperparameterPoint> grid;
  for (const char* text : {"method=snnr p=2 P=1 k=10 weight=uniform days=14", "method=persistence days=1",
                           "method=arima p=1 d=0 q=1 days=7", "method=nnr p=3 k=7 weight=inverse days=3",
                           "method=sarima p=1 d=0 q=0 P=1 D=0 Q=0 days=14 night=clock",
                           "method=nnr p=2 eps=0.1 weight=uniform days=3"})
    grid.push_back(parse_point(text));
  SearchConfig one;
  SearchConfig three = one;
  three.workers = 3;
  const auto r1 = run_search(datasets, grid, one);
  const auto r3 = run_search(datasets, grid, three);
  CHECK(r1.size() == grid.size() * datasets.size());
  CHECK(csv_of(r1) == csv_of(r3));
  // Canonical order: dataset, then method.
  for (std::size_t i = 1; i < r1.size(); ++i)
    if (r1[i].dataset_id == r1[i - 1].dataset_id) CHECK(r1[i - 1].point.method <= r1[i].point.method);
}

TEST_CASE("results CSV round trip") {
  std::mt19937_64 rng(12);
  const auto grid = enumerate_full_grid();
  std::vector<EvaluationRecord> records;
  for (int i = 0; i < 1000; ++i) records.push_back(random_record(rng, grid));
  std::stringstream buf;
  persist_results(buf, records);
  const auto back = load_results(buf);
  REQUIRE(back.size() == records.size());
  CHECK(back == records);
  CHECK(std::any_of(back.begin(), back.end(), [](const auto& r) { return !r.rmse[0].has_value(); }));
}

TEST_CASE("malformed results files name the row") {
  std::mt19937_64 rng(13);
  const auto grid = enumerate_full_grid();
  std::vector<EvaluationRecord> records;
  for (int i = 0; i < 5; ++i) records.push_back(random_record(rng, grid));
  std::string text = csv_of(records);
  // Truncate the third data row (line 4).
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  lines[3] = lines[3].substr(0, lines[3].size() / 2);
  std::string broken;
  for (const auto& l : lines) broken += l + "\n";
  std::istringstream bad(broken);
  try {
    load_results(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  std::istringstream no_header("nonsense\n");
  CHECK_THROWS_AS(load_results(no_header), ParseError);
}

TEST_CASE("summaries") {
  auto make = [](const char* point, Status st, double base) {
    EvaluationRecord r;
    r.dataset_id = "d";
    r.point = parse_point(point);
    r.status = st;
    for (int j = 1; j <= 12; ++j) r.rmse.push_back(st == Status::ok ? std::optional(base + j) : std::nullopt);
    return r;
  };
  const std::vector<EvaluationRecord> records{
      make("method=persistence days=1", Status::ok, 10.0),
      make("method=arima p=1 d=0 q=0", Status::ok, 20.0),
      make("method=arima p=2 d=0 q=0", Status::ok, 40.0),
      make("method=arima p=3 d=0 q=0", Status::unstable_model, 0.0),
      make("method=sarima p=1 d=0 q=0 P=1 D=0 Q=0", Status::training_timeout, 0.0),
  };
  const Summary by_method = summarize(records, GroupBy::method);
  CHECK(by_method.rows.size() == 2 * 3);
  CHECK(by_method.notices.size() == 1);  // sarima has no usable record
  const SummaryRow& single = by_method.rows[0];
  CHECK(single.group_key == "persistence");
  CHECK(single.step == 1);
  CHECK(single.stats.count == 1);
  for (double v : {single.stats.min, single.stats.q1, single.stats.median, single.stats.q3, single.stats.lower_whisker,
                   single.stats.upper_whisker})
    CHECK(v == 11.0);
  const SummaryRow& arima12 = by_method.rows[5];
  CHECK(arima12.group_key == "arima");
  CHECK(arima12.step == 12);
  CHECK(arima12.stats.count == 2);  // the unstable fit is filtered out
  CHECK(arima12.stats.median == 42.0);

  const Summary by_p = summarize(records, GroupBy::p);
  CHECK(by_p.rows.front().group_key == "1");
  const Summary by_k = summarize(records, GroupBy::k);
  CHECK(by_k.rows.empty());

  std::ostringstream out;
  write_summary(out, by_method);
  CHECK(out.str().rfind("group_key,step_j,count,min,q1,median,q3,lower_whisker,upper_whisker,outlier_count\n", 0) == 0);
  CHECK_THROWS_AS(parse_group_by("colour"), ConfigError);
}

TEST_CASE("forecast from an origin") {
  const Dataset ds = synthetic_dataset(9);
  const auto persistence = parse_point("method=persistence pre=irradiance days=1");
  const Eigen::VectorXd f = forecast_from(ds, persistence, 400);
  CHECK((f.array() == ds.series.values[400]).all());
  CHECK_THROWS_AS(forecast_from(ds, parse_point("method=snnr p=2 P=1 k=10 days=14"), 400), RangeError);

  // A reduced-grid point stays within [0, 1.5 I_e] at every step.
  const Dataset long_ds = synthetic_dataset(61);
  const auto snnr = enumerate_reduced_grid()[123];
  const Eigen::Index origin = 60 * 96 + 70;  // late morning local time
  const Eigen::VectorXd g = forecast_from(long_ds, snnr, origin);
  for (int j = 1; j <= 12; ++j) {
    const double ie = extraterrestrial_irradiance(long_ds.series.location, long_ds.series.solar_instant(origin + j));
    CHECK(std::isfinite(g[j - 1]));
    CHECK(g[j - 1] >= 0.0);
    CHECK(g[j - 1] <= 1.5 * ie + 1e-9);
  }
}

}
