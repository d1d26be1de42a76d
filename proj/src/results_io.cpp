#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "irradcast/search.hpp"

namespace irradcast {
namespace {

constexpr int kFixedColumns = 19;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t begin = 0;
  while (true) {
    const auto comma = line.find(',', begin);
    cells.push_back(line.substr(begin, comma - begin));
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  return cells;
}

class RowReader {
 public:
  RowReader(std::vector<std::string> cells, std::size_t line) : cells_(std::move(cells)), line_(line) {}

  const std::string& cell(std::size_t i) const { return cells_[i]; }
  bool empty(std::size_t i) const { return cells_[i].empty(); }

  int integer(std::size_t i) const {
    int v = 0;
    const auto& s = cells_[i];
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) fail(i, "integer");
    return v;
  }

  double real(std::size_t i) const {
    const auto& s = cells_[i];
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) fail(i, "number");
    return v;
  }

  std::optional<double> optional_real(std::size_t i) const {
    if (empty(i)) return std::nullopt;
    return real(i);
  }

  template <typename F>
  auto parse(std::size_t i, F&& f) const {
    try {
      return f(cells_[i]);
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), line_);
    }
  }

  [[noreturn]] void fail(std::size_t i, const char* expected) const {
    throw ParseError("column " + std::to_string(i + 1) + ": expected " + expected + ", got '" + cells_[i] + "'",
                     line_);
  }

  std::size_t line() const { return line_; }

 private:
  std::vector<std::string> cells_;
  std::size_t line_;
};

}  // namespace

std::string results_header(int horizon) {
  std::string h =
      "dataset_id,method,p,d,q,P_seas,D_seas,Q_seas,season,weight_mode,neighborhood_mode,k,epsilon,"
      "preprocessing,night_policy,training_days,status,fit_seconds,m";
  char buf[32];
  for (int j = 1; j <= horizon; ++j) {
    std::snprintf(buf, sizeof buf, ",rmse_%02d", j);
    h += buf;
  }
  return h;
}

void persist_results(std::ostream& out, const std::vector<EvaluationRecord>& records, int horizon) {
  out << results_header(horizon) << '\n';
  for (const auto& rec : records) {
    if (rec.dataset_id.find_first_of(",\n\r") != std::string::npos)
      throw ConfigError("dataset id '" + rec.dataset_id + "' cannot be written to CSV");
    if (rec.rmse.size() != std::size_t(horizon))
      throw DimensionError("record has " + std::to_string(rec.rmse.size()) + " RMSE steps, expected " +
                           std::to_string(horizon));
    const auto& pt = rec.point;
    std::string row = rec.dataset_id + ',' + std::string(to_string(pt.method));
    if (const auto* a = std::get_if<ArimaSpec>(&pt.model)) {
      row += ',' + std::to_string(a->p) + ',' + std::to_string(a->d) + ',' + std::to_string(a->q) + ',' +
             std::to_string(a->P) + ',' + std::to_string(a->D) + ',' + std::to_string(a->Q) + ',' +
             std::to_string(a->s) + ",,,,";
    } else if (const auto* n = std::get_if<NnrSpec>(&pt.model)) {
      row += ',' + std::to_string(n->p) + ",,," + std::to_string(n->P) + ",,," + std::to_string(n->s);
      row += n->weight == WeightMode::uniform ? ",uniform" : ",inverse";
      if (const auto* fk = std::get_if<FixedK>(&n->neighborhood))
        row += ",k," + std::to_string(fk->k) + ',';
      else
        row += ",epsilon,," + fmt(std::get<MaxDistance>(n->neighborhood).epsilon);
    } else {
      row += ",,,,,,,,,,,";
    }
    row += ',' + std::string(to_string(pt.data.preprocessing)) + ',' + std::string(to_string(pt.data.night_policy)) +
           ',' + std::to_string(pt.data.training_days) + ',' + std::string(to_string(rec.status)) + ',' +
           (rec.fit_seconds ? fmt(*rec.fit_seconds) : std::string()) + ',' + std::to_string(rec.forecast_count);
    for (const auto& r : rec.rmse) row += ',' + (r ? fmt(*r) : std::string());
    out << row << '\n';
  }
}

void persist_results(const std::string& path, const std::vector<EvaluationRecord>& records, int horizon) {
  // Serialize fully before touching the file so a failure leaves nothing behind.
  std::ostringstream buffer;
  persist_results(buffer, records, horizon);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << buffer.str();
  if (!out) throw Error("failed writing '" + path + "'");
}

std::vector<EvaluationRecord> load_results(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  const int horizon = int(header.size()) - kFixedColumns;
  if (horizon < 1 || line != results_header(horizon)) throw ParseError("unexpected results header", 1);

  std::vector<EvaluationRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " cells, found " + std::to_string(cells.size()),
                       lineno);
    const RowReader row(std::move(cells), lineno);

    EvaluationRecord rec;
    rec.dataset_id = row.cell(0);
    auto& pt = rec.point;
    pt.method = row.parse(1, parse_method);
    switch (pt.method) {
      case Method::persistence:
        break;
      case Method::arima:
      case Method::sarima: {
        ArimaSpec a;
        a.p = row.integer(2);
        a.d = row.integer(3);
        a.q = row.integer(4);
        a.P = row.integer(5);
        a.D = row.integer(6);
        a.Q = row.integer(7);
        a.s = row.integer(8);
        pt.model = a;
        break;
      }
      case Method::nnr:
      case Method::snnr: {
        NnrSpec n;
        n.p = row.integer(2);
        n.P = row.integer(5);
        n.s = row.integer(8);
        if (row.cell(9) == "uniform") n.weight = WeightMode::uniform;
        else if (row.cell(9) == "inverse") n.weight = WeightMode::inverse_distance;
        else row.fail(9, "weight mode");
        if (row.cell(10) == "k") n.neighborhood = FixedK{row.integer(11)};
        else if (row.cell(10) == "epsilon") n.neighborhood = MaxDistance{row.real(12)};
        else row.fail(10, "neighborhood mode");
        pt.model = n;
        break;
      }
    }
    pt.data.preprocessing = row.parse(13, parse_preprocessing);
    pt.data.night_policy = row.parse(14, parse_night_policy);
    pt.data.training_days = row.integer(15);
    rec.status = row.parse(16, parse_status);
    rec.fit_seconds = row.optional_real(17);
    const int m = row.integer(18);
    if (m < 0) row.fail(18, "non-negative count");
    rec.forecast_count = std::size_t(m);
    for (int j = 0; j < horizon; ++j) rec.rmse.push_back(row.optional_real(std::size_t(kFixedColumns + j)));
    const bool complete = std::all_of(rec.rmse.begin(), rec.rmse.end(), [](const auto& r) { return r.has_value(); });
    if ((rec.status == Status::ok) != complete)
      throw ParseError("status '" + row.cell(16) + "' inconsistent with the RMSE cells", lineno);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<EvaluationRecord> load_results(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return load_results(in);
}

}  // namespace irradcast
