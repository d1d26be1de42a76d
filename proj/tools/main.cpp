// irradcast command-line driver: prepare, synth, forecast, search, summarize.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>

#include "irradcast/config.hpp"
#include "irradcast/error.hpp"
#include "irradcast/search.hpp"
#include "irradcast/synth.hpp"

namespace fs = std::filesystem;
using namespace irradcast;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInternal = 2;

// Files are staged in memory and written only after every command input has
// been validated and all computation succeeded.
class OutputSet {
 public:
  void add(fs::path path, std::string content) { files_.emplace_back(std::move(path), std::move(content)); }

  void commit() const {
    for (const auto& [path, content] : files_) {
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      std::ofstream out(path, std::ios::binary);
      if (!out) throw Error("cannot open '" + path.string() + "' for writing");
      out << content;
      if (!out) throw Error("failed writing '" + path.string() + "'");
      std::cerr << "wrote " << path.string() << '\n';
    }
  }

 private:
  std::vector<std::pair<fs::path, std::string>> files_;
};

GeoLocation make_location(double lat, double lon, double elevation, int utc_offset) {
  GeoLocation loc{lat, lon, elevation, utc_offset};
  try {
    loc.validate();
  } catch (const RangeError& e) {
    throw ConfigError(e.what());
  }
  return loc;
}

void print_summary_table(std::ostream& out, const Summary& summary) {
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %4s %6s %10s %10s %10s %10s %10s\n", "group", "j", "count", "min", "q1",
                "median", "q3", "outliers");
  out << line;
  for (const auto& row : summary.rows) {
    const BoxStats& b = row.stats;
    std::snprintf(line, sizeof line, "%-16s %4d %6zu %10.3f %10.3f %10.3f %10.3f %10zu\n", row.group_key.c_str(),
                  row.step, b.count, b.min, b.q1, b.median, b.q3, b.outlier_count);
    out << line;
  }
  for (const auto& note : summary.notices) out << "note: " << note << '\n';
}

std::string to_csv(const Summary& summary) {
  std::ostringstream out;
  write_summary(out, summary);
  return out.str();
}

struct PrepareArgs {
  std::string input, output, gap_report;
  double latitude = 0, longitude = 0, elevation = 0;
  int utc_offset = 0;
};

int cmd_prepare(const PrepareArgs& a) {
  const GeoLocation loc = make_location(a.latitude, a.longitude, a.elevation, a.utc_offset);
  if (!fs::is_regular_file(a.input)) throw ConfigError("input '" + a.input + "' not found");
  TimeSeries raw;
  try {
    raw = ingest_csv(a.input, loc);
  } catch (const ParseError& e) {
    throw ConfigError(a.input + ": " + e.what());
  }
  const Resampled r = resample_15min(raw);

  std::ostringstream series, gaps;
  write_csv(series, r.series);
  gaps << "block_start,missing_minutes,action\n";
  std::size_t invalid = 0;
  for (const auto& g : r.gaps) {
    gaps << format_iso8601(g.block_start) << ',' << g.missing << ',' << (g.interpolated ? "interpolated" : "invalid")
         << '\n';
    invalid += g.interpolated ? 0 : 1;
  }
  OutputSet files;
  files.add(a.output, series.str());
  files.add(a.gap_report.empty() ? a.output + ".gaps.csv" : a.gap_report, gaps.str());
  files.commit();
  std::cerr << raw.size() << " input rows -> " << r.series.size() << " 15-min samples; " << r.gaps.size()
            << " blocks with gaps (" << invalid << " invalid)\n";
  return kExitOk;
}

struct SynthArgs {
  std::string output, start = "2020-05-01T00:00";
  double latitude = SynthSpec{}.location.latitude, longitude = SynthSpec{}.location.longitude,
         elevation = SynthSpec{}.location.elevation;
  int utc_offset = SynthSpec{}.location.utc_offset_minutes;
  int days = 67;
  std::uint64_t seed = 1;
  int step_minutes = 1;
};

int cmd_synth(const SynthArgs& a) {
  SynthSpec spec;
  spec.location = make_location(a.latitude, a.longitude, a.elevation, a.utc_offset);
  try {
    spec.start = parse_iso8601(a.start);
  } catch (const RangeError& e) {
    throw ConfigError(std::string("--start: ") + e.what());
  }
  if (a.days < 8) throw ConfigError("--days must be >= 8");
  if (a.step_minutes != 1 && a.step_minutes != 15) throw ConfigError("--step-minutes must be 1 or 15");
  spec.days = a.days;
  spec.seed = a.seed;
  spec.step = Seconds(60 * a.step_minutes);
  std::ostringstream out;
  write_csv(out, synthesize(spec).series);
  OutputSet files;
  files.add(a.output, out.str());
  files.commit();
  return kExitOk;
}

struct ForecastArgs {
  std::string config, dataset, point, origin, out = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;
};

int cmd_forecast(const ForecastArgs& a) {
  RunConfig cfg = load_run_config(a.config);
  if (a.seed_given) cfg.seed = a.seed;
  cfg.validate();
  const HyperparameterPoint point = parse_point(a.point);
  Instant origin_time;
  try {
    origin_time = parse_iso8601(a.origin);
  } catch (const RangeError& e) {
    throw ConfigError(std::string("--origin: ") + e.what());
  }
  const std::vector<Dataset> datasets = load_datasets(cfg);
  const Dataset* ds = &datasets.front();
  if (!a.dataset.empty()) {
    ds = nullptr;
    for (const auto& d : datasets)
      if (d.id == a.dataset) ds = &d;
    if (!ds) throw ConfigError("no dataset '" + a.dataset + "' in the configuration");
  }
  const TimeSeries& s = ds->series;
  const auto since = origin_time - s.start;
  if (since.count() < 0 || since.count() % s.step.count() != 0)
    throw ConfigError("origin must fall on a 15-min sample of dataset '" + ds->id + "'");
  const Eigen::Index origin = since.count() / s.step.count();

  Eigen::VectorXd fc;
  try {
    fc = forecast_from(*ds, point, origin, cfg.horizon, std::chrono::duration<double>(cfg.timeout_secs));
  } catch (const RangeError& e) {
    throw ConfigError(e.what());
  }
  std::ostringstream csv;
  csv << "target,step,forecast_wm2\n";
  char buf[96];
  for (int j = 1; j <= cfg.horizon; ++j) {
    const std::string target = format_iso8601(s.time_at(origin + j));
    std::snprintf(buf, sizeof buf, ",%d,%.6f\n", j, fc[j - 1]);
    csv << target << buf;
    std::cout << target << buf;
  }
  OutputSet files;
  files.add(fs::path(a.out) / "forecast.csv", csv.str());
  files.commit();
  return kExitOk;
}

struct SearchArgs {
  std::string config, grid, out = ".";
  int workers = 0;
  std::uint64_t seed = 0;
  double timeout_secs = 0;
  bool seed_given = false;
};

int cmd_search(const SearchArgs& a) {
  RunConfig cfg = load_run_config(a.config);
  if (!a.grid.empty()) cfg.grid = parse_grid_selection(a.grid);
  if (a.workers > 0) cfg.workers = a.workers;
  if (a.seed_given) cfg.seed = a.seed;
  if (a.timeout_secs > 0) cfg.timeout_secs = a.timeout_secs;
  cfg.validate();
  const auto grid = cfg.grid_points();
  const std::vector<Dataset> datasets = load_datasets(cfg);

  SearchConfig sc = cfg.search_config();
  std::mutex progress_mutex;
  std::size_t last_percent = 101;
  sc.progress = [&](std::size_t done, std::size_t total) {
    std::lock_guard lock(progress_mutex);
    const std::size_t percent = done * 100 / total;
    if (percent != last_percent || done == total) {
      last_percent = percent;
      std::cerr << "\rsearch: " << done << '/' << total << " (" << percent << "%)" << (done == total ? "\n" : "")
                << std::flush;
    }
  };
  std::cerr << "search: " << grid.size() << " points x " << datasets.size() << " datasets, " << cfg.workers
            << " workers\n";
  const auto records = run_search(datasets, grid, sc);

  std::vector<EvaluationRecord> reference;
  if (cfg.include_reference) {
    SearchConfig quiet = sc;
    quiet.progress = nullptr;
    reference = run_search(datasets, {reference_point()}, quiet);
  }

  std::ostringstream results, ref;
  persist_results(results, records, cfg.horizon);
  persist_results(ref, reference, cfg.horizon);
  const Summary summary = summarize(records, GroupBy::method);
  OutputSet files;
  const fs::path out = a.out;
  files.add(out / "results.csv", results.str());
  files.add(out / "summary.csv", to_csv(summary));
  if (!reference.empty()) files.add(out / "reference.csv", ref.str());
  files.commit();
  print_summary_table(std::cout, summary);
  for (const auto& r : reference) {
    std::cout << "reference (" << r.dataset_id << "): " << to_string(r.status);
    for (int j : kSummarySteps)
      if (j <= cfg.horizon && r.rmse[std::size_t(j - 1)]) std::cout << "  rmse_" << j << '=' << *r.rmse[std::size_t(j - 1)];
    std::cout << '\n';
  }
  return kExitOk;
}

struct SummarizeArgs {
  std::string results, group_by = "method", out;
};

int cmd_summarize(const SummarizeArgs& a) {
  const GroupBy group = parse_group_by(a.group_by);
  if (!fs::is_regular_file(a.results)) throw ConfigError("results file '" + a.results + "' not found");
  std::vector<EvaluationRecord> records;
  try {
    records = load_results(a.results);
  } catch (const ParseError& e) {
    throw ConfigError(a.results + ": " + e.what());
  }
  const Summary summary = summarize(records, group);
  if (!a.out.empty()) {
    OutputSet files;
    files.add(fs::path(a.out) / ("summary_" + std::string(to_string(group)) + ".csv"), to_csv(summary));
    files.commit();
  }
  print_summary_table(std::cout, summary);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solar irradiance forecasting: persistence, (S)ARIMA and (S)NNR with hyperparameter search"};
  app.require_subcommand(1);

  PrepareArgs prep;
  auto* prepare = app.add_subcommand("prepare", "Resample a 1-min irradiance CSV to 15-min blocks");
  prepare->add_option("input", prep.input, "Input CSV (timestamp,ghi_wm2[,zenith_deg])")->required();
  prepare->add_option("-o,--output", prep.output, "Output 15-min CSV")->required();
  prepare->add_option("--gap-report", prep.gap_report, "Gap report CSV (default <output>.gaps.csv)");
  prepare->add_option("--latitude", prep.latitude)->required();
  prepare->add_option("--longitude", prep.longitude)->required();
  prepare->add_option("--elevation", prep.elevation);
  prepare->add_option("--utc-offset-minutes", prep.utc_offset, "Local standard time offset");

  SynthArgs syn;
  auto* synth = app.add_subcommand("synth", "Write a seeded synthetic irradiance CSV");
  synth->add_option("-o,--output", syn.output)->required();
  synth->add_option("--days", syn.days, "Number of days (>= 8)");
  synth->add_option("--seed", syn.seed);
  synth->add_option("--start", syn.start, "First sample, UTC");
  synth->add_option("--step-minutes", syn.step_minutes, "1 or 15");
  synth->add_option("--latitude", syn.latitude);
  synth->add_option("--longitude", syn.longitude);
  synth->add_option("--elevation", syn.elevation);
  synth->add_option("--utc-offset-minutes", syn.utc_offset);

  ForecastArgs fc;
  auto* forecast = app.add_subcommand("forecast", "Train one point and forecast from an origin");
  forecast->add_option("--config", fc.config)->required();
  forecast->add_option("--point", fc.point, "e.g. 'method=snnr p=3 P=2 k=12 weight=uniform'")->required();
  forecast->add_option("--origin", fc.origin, "Origin sample start time, UTC")->required();
  forecast->add_option("--dataset", fc.dataset, "Dataset id (default: first)");
  forecast->add_option("--seed", fc.seed);
  forecast->add_option("--out", fc.out, "Output directory");

  SearchArgs sa;
  auto* search = app.add_subcommand("search", "Run the hyperparameter search");
  search->add_option("--config", sa.config)->required();
  search->add_option("--grid", sa.grid)->check(CLI::IsMember({"full", "reduced", "explicit"}));
  search->add_option("--workers", sa.workers)->check(CLI::PositiveNumber);
  search->add_option("--seed", sa.seed);
  search->add_option("--timeout-secs", sa.timeout_secs)->check(CLI::PositiveNumber);
  search->add_option("--out", sa.out, "Output directory");

  SummarizeArgs su;
  auto* summarize_cmd = app.add_subcommand("summarize", "Box statistics of a results CSV");
  summarize_cmd->add_option("results", su.results)->required();
  summarize_cmd->add_option("--group-by", su.group_by,
                            "method|preprocessing|night_policy|training_days|p|P|weight|neighborhood|k");
  summarize_cmd->add_option("--out", su.out, "Directory for summary_<group>.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  fc.seed_given = forecast->count("--seed") > 0;
  sa.seed_given = search->count("--seed") > 0;

  try {
    if (*prepare) return cmd_prepare(prep);
    if (*synth) return cmd_synth(syn);
    if (*forecast) return cmd_forecast(fc);
    if (*search) return cmd_search(sa);
    if (*summarize_cmd) return cmd_summarize(su);
  } catch (const DimensionError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
