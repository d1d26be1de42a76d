#include "irradcast/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace irradcast {
namespace {

using nlohmann::json;

void reject_unknown(const json& object, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& item : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

template <typename T>
T get(const json& object, const char* key, const std::string& where) {
  try {
    return object.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": '" + key + "' is missing or has the wrong type");
  }
}

template <typename T>
void get_optional(const json& object, const char* key, const std::string& where, T& target) {
  if (object.contains(key)) target = get<T>(object, key, where);
}

DatasetSource parse_dataset(const json& j, std::size_t index, const std::filesystem::path& base_dir) {
  const std::string where = "datasets[" + std::to_string(index) + "]";
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  reject_unknown(j, {"id", "path", "synthetic", "latitude", "longitude", "elevation", "utc_offset_minutes"}, where);
  DatasetSource d;
  d.id = get<std::string>(j, "id", where);
  d.location.latitude = get<double>(j, "latitude", where);
  d.location.longitude = get<double>(j, "longitude", where);
  get_optional(j, "elevation", where, d.location.elevation);
  get_optional(j, "utc_offset_minutes", where, d.location.utc_offset_minutes);
  if (j.contains("path") == j.contains("synthetic")) throw ConfigError(where + ": give exactly one of path, synthetic");
  if (j.contains("path")) {
    std::filesystem::path p = get<std::string>(j, "path", where);
    d.path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  } else {
    const json& s = j.at("synthetic");
    if (!s.is_object()) throw ConfigError(where + ".synthetic: expected an object");
    reject_unknown(s, {"days", "start"}, where + ".synthetic");
    d.synthetic_days = get<int>(s, "days", where + ".synthetic");
    d.synthetic_start = SynthSpec{}.start;
    if (s.contains("start")) {
      try {
        d.synthetic_start = parse_iso8601(get<std::string>(s, "start", where + ".synthetic"));
      } catch (const RangeError& e) {
        throw ConfigError(where + ".synthetic.start: " + e.what());
      }
    }
  }
  return d;
}

}  // namespace

GridSelection parse_grid_selection(std::string_view text) {
  if (text == "full") return GridSelection::full;
  if (text == "reduced") return GridSelection::reduced;
  if (text == "explicit") return GridSelection::explicit_list;
  throw ConfigError("grid must be full, reduced or explicit, got '" + std::string(text) + "'");
}

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("configuration must be a JSON object");
  reject_unknown(root,
                 {"datasets", "grid", "points", "horizon", "test_days", "timeout_secs", "workers", "seed",
                  "record_timing", "include_reference"},
                 "config");

  RunConfig cfg;
  const std::string where = "config";
  if (!root.contains("datasets") || !root["datasets"].is_array())
    throw ConfigError("config: 'datasets' must be a list");
  for (std::size_t i = 0; i < root["datasets"].size(); ++i)
    cfg.datasets.push_back(parse_dataset(root["datasets"][i], i, base_dir));
  if (root.contains("grid")) cfg.grid = parse_grid_selection(get<std::string>(root, "grid", where));
  if (root.contains("points")) {
    for (const auto& text : get<std::vector<std::string>>(root, "points", where))
      cfg.points.push_back(parse_point(text));
  }
  get_optional(root, "horizon", where, cfg.horizon);
  get_optional(root, "test_days", where, cfg.test_days);
  get_optional(root, "timeout_secs", where, cfg.timeout_secs);
  get_optional(root, "workers", where, cfg.workers);
  get_optional(root, "seed", where, cfg.seed);
  get_optional(root, "record_timing", where, cfg.record_timing);
  get_optional(root, "include_reference", where, cfg.include_reference);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str(), path.parent_path());
}

void RunConfig::validate() const {
  if (datasets.empty()) throw ConfigError("config: no datasets");
  std::set<std::string> ids;
  for (const auto& d : datasets) {
    if (d.id.empty() || d.id.find_first_of(",\n\r\"") != std::string::npos)
      throw ConfigError("dataset id '" + d.id + "' must be non-empty without commas, quotes or newlines");
    if (!ids.insert(d.id).second) throw ConfigError("duplicate dataset id '" + d.id + "'");
    try {
      d.location.validate();
    } catch (const RangeError& e) {
      throw ConfigError("dataset '" + d.id + "': " + e.what());
    }
    if (d.path && !std::filesystem::is_regular_file(*d.path))
      throw ConfigError("dataset '" + d.id + "': file '" + d.path->string() + "' not found");
    if (d.synthetic_days && *d.synthetic_days < 8) throw ConfigError("dataset '" + d.id + "': synthetic days < 8");
  }
  if (grid == GridSelection::explicit_list && points.empty()) throw ConfigError("explicit grid without points");
  if (grid != GridSelection::explicit_list && !points.empty())
    throw ConfigError("'points' is only allowed with grid 'explicit'");
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (test_days < 1) throw ConfigError("test_days must be >= 1");
  if (!(timeout_secs > 0.0)) throw ConfigError("timeout_secs must be positive");
  if (workers < 1) throw ConfigError("workers must be >= 1");
}

std::vector<HyperparameterPoint> RunConfig::grid_points() const {
  std::vector<HyperparameterPoint> out;
  switch (grid) {
    case GridSelection::full: out = enumerate_full_grid(); break;
    case GridSelection::reduced: out = enumerate_reduced_grid(); break;
    case GridSelection::explicit_list: out = points; break;
  }
  return out;
}

SearchConfig RunConfig::search_config() const {
  SearchConfig sc;
  sc.horizon = horizon;
  sc.test_days = test_days;
  sc.timeout = std::chrono::duration<double>(timeout_secs);
  sc.workers = workers;
  sc.record_timing = record_timing;
  return sc;
}

std::vector<Dataset> load_datasets(const RunConfig& config) {
  std::vector<Dataset> out;
  std::uint64_t synthetic_index = 0;
  for (const auto& src : config.datasets) {
    TimeSeries raw;
    if (src.path) {
      try {
        raw = ingest_csv(src.path->string(), src.location);
      } catch (const ParseError& e) {
        throw ConfigError(src.path->string() + ": " + e.what());
      }
    } else {
      SynthSpec spec;
      spec.location = src.location;
      spec.start = src.synthetic_start;
      spec.days = *src.synthetic_days;
      spec.seed = config.seed + synthetic_index++;
      raw = synthesize(spec).series;
    }
    out.push_back({src.id, resample_15min(raw).series});
  }
  return out;
}

}  // namespace irradcast
