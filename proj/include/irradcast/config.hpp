#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "irradcast/search.hpp"
#include "irradcast/synth.hpp"

namespace irradcast {

enum class GridSelection { full, reduced, explicit_list };
GridSelection parse_grid_selection(std::string_view text);

struct DatasetSource {
  std::string id;
  std::optional<std::filesystem::path> path;  // measured CSV, or
  std::optional<int> synthetic_days;          // a generated series
  Instant synthetic_start{};
  GeoLocation location;
};

/// Parsed run configuration (JSON). Relative dataset paths resolve against
/// the directory of the configuration file.
struct RunConfig {
  std::vector<DatasetSource> datasets;
  GridSelection grid = GridSelection::reduced;
  std::vector<HyperparameterPoint> points;  // explicit grid
  int horizon = kDefaultHorizon;
  int test_days = 7;
  double timeout_secs = 60.0;
  int workers = 1;
  std::uint64_t seed = 1;
  bool record_timing = false;
  bool include_reference = true;  // also evaluate persistence on transmissivity, reported apart from the grid

  /// Throws ConfigError naming the first offending field; checks that dataset files exist.
  void validate() const;
  std::vector<HyperparameterPoint> grid_points() const;
  SearchConfig search_config() const;
};

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Ingests (and resamples) or generates every dataset. Synthetic dataset i
/// uses seed + i.
std::vector<Dataset> load_datasets(const RunConfig& config);

}  // namespace irradcast
