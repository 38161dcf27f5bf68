#include "eqalloc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "eqalloc/error.hpp"

namespace eqalloc {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) {
    const auto a = cell.find_first_not_of(" \t\r");
    const auto b = cell.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? std::string() : cell.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_long(const std::string& s, long& out) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    double back = 0.0;
    if (parse_double(buf, back) && back == v) break;
  }
  return buf;
}

std::vector<IoRecord> read_history(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Ingestion, source + ": empty file");
  const auto header = split(line, ',');
  if (header.size() < 4 || header[0] != "community" || header[1] != "period")
    throw Error(ErrorKind::Ingestion, source + ": header must start with community,period");
  std::size_t m = 0;
  std::size_t p = 0;
  for (std::size_t c = 2; c < header.size(); ++c) {
    if (header[c] == "u_" + std::to_string(m + 1) && p == 0) {
      ++m;
    } else if (header[c] == "y_" + std::to_string(p + 1)) {
      ++p;
    } else {
      throw Error(ErrorKind::Ingestion, source + ": unexpected column '" + header[c] + "'");
    }
  }
  if (m == 0 || p == 0) throw Error(ErrorKind::Ingestion, source + ": need at least one u_ and one y_ column");

  std::vector<IoRecord> records;
  std::map<std::pair<std::size_t, long>, std::size_t> seen;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line, ',');
    const std::string where = source + " row " + std::to_string(row);
    if (cells.size() != header.size())
      throw Error(ErrorKind::Ingestion, where + ": expected " + std::to_string(header.size()) + " columns, found " +
                                            std::to_string(cells.size()));
    IoRecord rec;
    long community = 0;
    if (!parse_long(cells[0], community) || community < 0)
      throw Error(ErrorKind::Ingestion, where + ": community '" + cells[0] + "' is not a nonnegative integer");
    if (!parse_long(cells[1], rec.period))
      throw Error(ErrorKind::Ingestion, where + ": period '" + cells[1] + "' is not an integer");
    rec.community = static_cast<std::size_t>(community);
    rec.u.resize(static_cast<Eigen::Index>(m));
    rec.y.resize(static_cast<Eigen::Index>(p));
    for (std::size_t c = 2; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v))
        throw Error(ErrorKind::Ingestion, where + ": column '" + header[c] + "' value '" + cells[c] + "' is not numeric");
      if (c < 2 + m) {
        rec.u[static_cast<Eigen::Index>(c - 2)] = v;
      } else {
        rec.y[static_cast<Eigen::Index>(c - 2 - m)] = v;
      }
    }
    const auto key = std::make_pair(rec.community, rec.period);
    if (auto it = seen.find(key); it != seen.end())
      throw Error(ErrorKind::Ingestion, where + ": duplicate (community, period) first seen in row " +
                                            std::to_string(it->second));
    seen.emplace(key, row);
    records.push_back(std::move(rec));
  }
  std::stable_sort(records.begin(), records.end(), [](const IoRecord& a, const IoRecord& b) {
    return std::tie(a.community, a.period) < std::tie(b.community, b.period);
  });
  return records;
}

std::vector<IoRecord> ingest_history(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Ingestion, "cannot open " + path.string());
  return read_history(in, path.string());
}

void write_history(std::ostream& out, std::span<const IoRecord> records) {
  if (records.empty()) throw Error(ErrorKind::NoData, "no records to write");
  out << "community,period";
  for (Eigen::Index a = 0; a < records.front().u.size(); ++a) out << ",u_" << a + 1;
  for (Eigen::Index j = 0; j < records.front().y.size(); ++j) out << ",y_" << j + 1;
  out << '\n';
  for (const auto& rec : records) {
    out << rec.community << ',' << rec.period;
    for (Eigen::Index a = 0; a < rec.u.size(); ++a) out << ',' << format_double(rec.u[a]);
    for (Eigen::Index j = 0; j < rec.y.size(); ++j) out << ',' << format_double(rec.y[j]);
    out << '\n';
  }
}

void write_run_csv(std::ostream& out, const RunTable& table) {
  out << "realization,policy,period,metric,value\n";
  for (const auto& row : table)
    out << row.realization << ',' << row.policy << ',' << row.period << ',' << row.metric << ','
        << format_double(row.value) << '\n';
}

RunTable read_run_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || split(line, ',') != std::vector<std::string>{"realization", "policy", "period", "metric", "value"})
    throw Error(ErrorKind::Ingestion, "run CSV: bad header");
  RunTable table;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    long r = 0;
    long k = 0;
    RunRow rec;
    if (cells.size() != 5 || !parse_long(cells[0], r) || !parse_long(cells[2], k) || !parse_double(cells[4], rec.value) ||
        r < 0 || k < 0)
      throw Error(ErrorKind::Ingestion, "run CSV row " + std::to_string(row) + ": malformed");
    rec.realization = static_cast<std::size_t>(r);
    rec.period = static_cast<std::size_t>(k);
    rec.policy = cells[1];
    rec.metric = cells[3];
    table.push_back(std::move(rec));
  }
  return table;
}

json summary_json(const RunResult& result, const std::vector<MetricSeries>& aggregates) {
  json series = json::array();
  for (const auto& s : aggregates) {
    if (s.metric.rfind("u[", 0) == 0 || s.metric.rfind("y[", 0) == 0) continue;
    series.push_back({{"policy", s.policy}, {"metric", s.metric}, {"mean", s.mean}, {"std", s.std}, {"count", s.count}});
  }
  json normalized = json::object();
  for (std::size_t p = 0; p < result.policies.size(); ++p) {
    normalized[result.policies[p]] = {
        {"equitability", result.normalized_end(p, &PeriodMetrics::equitability)},
        {"equal_allocation", result.normalized_end(p, &PeriodMetrics::equal_allocation)},
    };
  }
  return json{{"name", result.name},
              {"seed", result.seed},
              {"horizon", result.horizon},
              {"realizations", result.realizations},
              {"policies", result.policies},
              {"normalized_end", std::move(normalized)},
              {"series", std::move(series)}};
}

json to_json(const std::vector<RhoSweepRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"rho", r.rho},
                   {"equitability_ratio", r.equitability_ratio},
                   {"equal_allocation_ratio", r.equal_allocation_ratio},
                   {"mean_outcome", std::vector<double>(r.mean_outcome.begin(), r.mean_outcome.end())},
                   {"outcome_std", std::vector<double>(r.outcome_std.begin(), r.outcome_std.end())}});
  }
  return out;
}

json to_json(const std::vector<ParetoRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"rho", r.rho},
                   {"sigma", r.sigma},
                   {"equitability_ratio", r.equitability_ratio},
                   {"equal_allocation_ratio", r.equal_allocation_ratio},
                   {"quadrant", to_string(r.quadrant)}});
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<RhoSweepRow>& rows) {
  out << "rho,equitability_ratio,equal_allocation_ratio";
  const Eigen::Index p = rows.empty() ? 0 : rows.front().mean_outcome.size();
  for (Eigen::Index j = 0; j < p; ++j) out << ",mean_outcome_" << j + 1 << ",outcome_std_" << j + 1;
  out << '\n';
  for (const auto& r : rows) {
    out << format_double(r.rho) << ',' << format_double(r.equitability_ratio) << ','
        << format_double(r.equal_allocation_ratio);
    for (Eigen::Index j = 0; j < p; ++j)
      out << ',' << format_double(r.mean_outcome[j]) << ',' << format_double(r.outcome_std[j]);
    out << '\n';
  }
}

void write_csv(std::ostream& out, const std::vector<ParetoRow>& rows) {
  out << "rho,sigma,equitability_ratio,equal_allocation_ratio,quadrant\n";
  for (const auto& r : rows)
    out << format_double(r.rho) << ',' << format_double(r.sigma) << ',' << format_double(r.equitability_ratio) << ','
        << format_double(r.equal_allocation_ratio) << ',' << to_string(r.quadrant) << '\n';
}

json estimates_json(std::span<const MapEstimate> estimates) {
  json list = json::array();
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const auto& e = estimates[i];
    json rows = json::array();
    for (Eigen::Index r = 0; r < e.G_hat.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < e.G_hat.cols(); ++c) row.push_back(e.G_hat(r, c));
      rows.push_back(std::move(row));
    }
    json item{{"community", i}, {"G_hat", std::move(rows)}, {"n_samples", e.n_samples}, {"rank_deficient", e.rank_deficient}};
    if (e.window) item["window"] = *e.window;
    list.push_back(std::move(item));
  }
  return json{{"schema_version", 1}, {"estimates", std::move(list)}};
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::InvalidInput, "failed writing " + path.string());
}

}  // namespace eqalloc
