#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eqalloc/estimation.hpp"
#include "eqalloc/scenarios.hpp"

namespace eqalloc {

// History CSV: header "community,period,u_1..u_m,y_1..y_p", one record per
// line. Records come back sorted by (community, period).
std::vector<IoRecord> read_history(std::istream& in, const std::string& source = "history");
std::vector<IoRecord> ingest_history(const std::filesystem::path& path);
void write_history(std::ostream& out, std::span<const IoRecord> records);

/// Shortest round-trip decimal form.
std::string format_double(double v);

// Run CSV: "realization,policy,period,metric,value".
void write_run_csv(std::ostream& out, const RunTable& table);
RunTable read_run_csv(std::istream& in);

nlohmann::json summary_json(const RunResult& result, const std::vector<MetricSeries>& aggregates);
nlohmann::json to_json(const std::vector<RhoSweepRow>& rows);
nlohmann::json to_json(const std::vector<ParetoRow>& rows);
void write_csv(std::ostream& out, const std::vector<RhoSweepRow>& rows);
void write_csv(std::ostream& out, const std::vector<ParetoRow>& rows);
nlohmann::json estimates_json(std::span<const MapEstimate> estimates);

/// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace eqalloc
