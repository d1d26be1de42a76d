#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "irradcast/config.hpp"
#include "irradcast/error.hpp"
#include "irradcast/synth.hpp"

using namespace irradcast;

namespace {

const char* kMinimal = R"({
  "datasets": [{"id": "syn", "synthetic": {"days": 20}, "latitude": 39.74, "longitude": -105.18,
                "elevation": 1829, "utc_offset_minutes": -420}],
  "grid": "explicit",
  "points": ["method=persistence days=1", "method=snnr p=2 P=1 k=10 weight=uniform days=14"],
  "seed": 5, "workers": 2, "timeout_secs": 30
})";

}  // namespace

TEST_SUITE("config") {

TEST_CASE("parse a complete configuration") {
  const RunConfig cfg = parse_run_config(kMinimal);
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.datasets.size() == 1);
  CHECK(cfg.datasets[0].synthetic_days == 20);
  CHECK(cfg.grid == GridSelection::explicit_list);
  CHECK(cfg.grid_points().size() == 2);
  CHECK(cfg.seed == 5);
  CHECK(cfg.search_config().workers == 2);
  CHECK(cfg.search_config().timeout.count() == 30.0);
  CHECK(cfg.horizon == 12);
}

TEST_CASE("rejections") {
  CHECK_THROWS_AS(parse_run_config(R"({"datasets": [], "colour": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"datasets": [{"id": "x", "latitude": 1, "longitude": 2}]})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"datasets": [{"id": "x", "path": "a.csv", "latitude": 1, "longitude": 2,
                                     "altitude": 3}]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"datasets": [], "grid": "huge"})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"datasets": [], "horizon": "twelve"})"), ConfigError);

  RunConfig missing = parse_run_config(
      R"({"datasets": [{"id": "x", "path": "/nonexistent/data.csv", "latitude": 1, "longitude": 2}]})");
  CHECK_THROWS_AS(missing.validate(), ConfigError);
  RunConfig bad_workers = parse_run_config(kMinimal);
  bad_workers.workers = 0;
  CHECK_THROWS_AS(bad_workers.validate(), ConfigError);
  RunConfig duplicate = parse_run_config(kMinimal);
  duplicate.datasets.push_back(duplicate.datasets[0]);
  CHECK_THROWS_AS(duplicate.validate(), ConfigError);
}

TEST_CASE("grid selection and reference point") {
  RunConfig cfg = parse_run_config(kMinimal);
  cfg.grid = GridSelection::reduced;
  cfg.points.clear();
  CHECK(cfg.grid_points().size() == 847);
  CHECK(reference_point().method == Method::persistence);
  CHECK(reference_point().data.preprocessing == Preprocessing::transmissivity);
}

TEST_CASE("relative dataset paths resolve against the config directory") {
  const auto dir = std::filesystem::temp_directory_path() / "irradcast_config_test";
  std::filesystem::create_directories(dir);
  SynthSpec spec;
  spec.days = 8;
  write_csv((dir / "site.csv").string(), synthesize(spec).series);
  {
    std::ofstream cfg(dir / "run.json");
    cfg << R"({"datasets": [{"id": "site", "path": "site.csv", "latitude": 39.74, "longitude": -105.18,
              "elevation": 1829, "utc_offset_minutes": -420}]})";
  }
  const RunConfig cfg = load_run_config(dir / "run.json");
  CHECK_NOTHROW(cfg.validate());
  const auto datasets = load_datasets(cfg);
  REQUIRE(datasets.size() == 1);
  CHECK(datasets[0].series.step == kFifteenMinutes);
  CHECK(datasets[0].series.size() == 8 * 96);
  std::filesystem::remove_all(dir);
}

}

TEST_SUITE("synth") {

TEST_CASE("seeded output is reproducible") {
  SynthSpec spec;
  spec.days = 8;
  spec.seed = 99;
  std::ostringstream a, b;
  write_csv(a, synthesize(spec).series);
  write_csv(b, synthesize(spec).series);
  CHECK(a.str() == b.str());
  spec.seed = 100;
  std::ostringstream c;
  write_csv(c, synthesize(spec).series);
  CHECK(a.str() != c.str());
}

TEST_CASE("bounds and night rows") {
  SynthSpec spec;
  spec.days = 10;
  const SynthOutput out = synthesize(spec);
  CHECK(out.series.size() == 10 * 1440);
  CHECK(out.cloud.minCoeff() >= 0.0);
  CHECK(out.cloud.maxCoeff() <= kMaxCloudFactor);
  const SolarTrack track = solar_track(out.series);
  for (Eigen::Index i = 0; i < out.series.size(); ++i) {
    if (track.zenith[i] >= 90.0) CHECK(out.series.values[i] == 0.0);
    CHECK(out.series.values[i] <= kMaxIrradiance);
  }
  spec.days = 7;
  CHECK_THROWS_AS(synthesize(spec), RangeError);
}

TEST_CASE("cloud factor persists within a day") {
  SynthSpec spec;
  spec.days = 20;
  const SynthOutput out = synthesize(spec);
  // Lag-15 autocorrelation of the cloud factor stays high (relaxation time ~2 h).
  const Eigen::VectorXd c = out.cloud.array() - out.cloud.mean();
  const Eigen::Index n = c.size();
  const double r15 = c.head(n - 15).dot(c.tail(n - 15)) / c.squaredNorm();
  CHECK(r15 > 0.8);
}

}
