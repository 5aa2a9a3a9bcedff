#include "perclab/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace perclab {

using nlohmann::json;

json to_json(const MCEstimate& e) {
  return {{"sum", e.sum},           {"trials", e.trials},         {"point", e.point},
          {"ci_low", e.ci_low},     {"ci_high", e.ci_high},       {"confidence", e.confidence},
          {"std_error", e.std_error}};
}

json to_json(const ThresholdResult& r) {
  return {{"p", r.p},
          {"target", r.target},
          {"target_level", r.target_level},
          {"bracket_lo", r.bracket_lo},
          {"bracket_hi", r.bracket_hi},
          {"trials_per_eval", r.trials_per_eval},
          {"converged", r.converged},
          {"estimate_at_p", to_json(r.estimate_at_p)}};
}

json to_json(const LabRow& r) {
  return {{"check", r.check}, {"graph", r.graph},   {"inputs", r.inputs},
          {"lhs", r.lhs},     {"rhs", r.rhs},       {"margin", r.margin},
          {"sigma", r.sigma}, {"verdict", to_string(r.verdict)}, {"note", r.note}};
}

namespace {
std::string hex(std::uint64_t x) {
  char buf[19] = "0x";
  auto res = std::to_chars(buf + 2, buf + sizeof buf, x, 16);
  return std::string(buf, res.ptr);
}
}  // namespace

json to_json(const LabReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back(to_json(row));
  json series = json::array();
  for (const auto& s : r.series) series.push_back({{"name", s.name}, {"x_label", s.x_label}, {"y_label", s.y_label}});
  return {{"experiment", r.experiment},
          {"verdict", to_string(r.verdict)},
          {"exit_code", exit_code(r.verdict)},
          {"manifest", r.manifest.to_json()},
          {"rows", rows},
          {"series", series},
          {"series_points", r.points.size()},
          {"provenance",
           {{"seed", r.manifest.seed}, {"seed_hex", hex(r.manifest.seed)}, {"code_version", kVersion},
            {"wall_time_s", r.wall_time_s}}}};
}

json graph_metrics(const FiniteGraph& g, const MetricProfile& profile) {
  json degree = nullptr;
  if (auto d = g.regular_degree()) degree = *d;
  return {{"spec", g.spec_string()},         {"vertices", g.vertex_count()}, {"edges", g.edge_count()},
          {"degree", degree},                {"diameter", profile.diameter}, {"growth", profile.growth}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  return out;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {
std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}
}  // namespace

void write_report_csv(const LabReport& r, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "check,graph,inputs,lhs,rhs,margin,sigma,verdict,note\n";
  for (const auto& row : r.rows) {
    out << csv_field(row.check) << ',' << csv_field(row.graph) << ',' << csv_field(row.inputs.dump()) << ','
        << format_number(row.lhs) << ',' << format_number(row.rhs) << ',' << format_number(row.margin) << ','
        << format_number(row.sigma) << ',' << to_string(row.verdict) << ',' << csv_field(row.note) << '\n';
  }
}

void write_series_csv(const LabReport& r, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "series,curve,x,y\n";
  for (const auto& p : r.points)
    out << csv_field(p.series) << ',' << csv_field(p.curve) << ',' << format_number(p.x) << ','
        << format_number(p.y) << '\n';
}

void write_json(const json& doc, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

}  // namespace perclab
