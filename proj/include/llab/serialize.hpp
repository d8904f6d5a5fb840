#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "llab/loewner.hpp"
#include "llab/rate.hpp"

namespace llab {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const MeasureS1& mu);
MeasureS1 measure_from_json(const Json& j);

/// Slab-backed measures only.
Json to_json(const DrivingMeasure& rho);
DrivingMeasure driving_from_json(const Json& j);

Json to_json(const LevelTuple& tuple);
LevelTuple tuple_from_json(const Json& j);

Json to_json(const RateReport& report);
RateReport rate_report_from_json(const Json& j);

/// Decimal with 17 significant digits; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double x);
double parse_double(const std::string& text);

/// Columns: re, im, survival_time, status. Survival time is empty for probes alive at t.
void write_hull_csv(std::ostream& out, const HullGrid& grid);

struct TraceSample {
  double t;
  TracePoint point;
};
/// Columns: t, re, im, error_gauge (error_gauge empty when not refined).
void write_trace_csv(std::ostream& out, const std::vector<TraceSample>& samples);

/// Generic numeric table with a header row.
void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

/// Writes `content` to `path`, creating parent directories; errors name the path.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

const char* to_string(ProbeStatus status);

}  // namespace llab
