#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "perclab/estimators.hpp"
#include "perclab/labs.hpp"
#include "perclab/metric.hpp"
#include "perclab/solve.hpp"

namespace perclab {

inline constexpr const char* kVersion = "0.1.0";

nlohmann::json to_json(const MCEstimate& e);
nlohmann::json to_json(const ThresholdResult& r);
nlohmann::json to_json(const LabRow& r);
/// Full report document. Only `provenance.wall_time_s` varies between reruns.
nlohmann::json to_json(const LabReport& r);

/// |V|, |E|, degree, diameter and the growth table Gr(0..diameter).
nlohmann::json graph_metrics(const FiniteGraph& g, const MetricProfile& profile);

/// RFC 4180 field quoting.
std::string csv_field(const std::string& s);
std::vector<std::string> parse_csv_line(const std::string& line);

/// Flat rows: check,graph,inputs,lhs,rhs,margin,sigma,verdict,note
void write_report_csv(const LabReport& r, const std::filesystem::path& path);
/// series,curve,x,y
void write_series_csv(const LabReport& r, const std::filesystem::path& path);
void write_json(const nlohmann::json& doc, const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double (inf/nan spelled out).
std::string format_number(double x);

}  // namespace perclab
