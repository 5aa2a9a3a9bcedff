#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "perclab/estimators.hpp"

namespace perclab {

/// Declarative description of one lab run.
struct Manifest {
  std::string experiment;
  std::vector<std::string> graphs;
  std::vector<double> p;
  std::vector<double> scales;
  std::vector<double> alpha;
  std::vector<double> delta;
  std::uint64_t trials = 400;
  std::uint64_t seed = kDefaultSeed;
  double confidence = 0.95;
  double max_inconclusive_fraction = 0.2;
  std::map<std::string, double> tolerances;
  nlohmann::json params = nlohmann::json::object();
  /// Not part of the manifest document: set from the command line. Never
  /// changes results.
  unsigned workers = 1;

  double tolerance(const std::string& name, double fallback) const;
  McParams mc(std::uint64_t trials_override = 0) const;
  nlohmann::json to_json() const;
};

/// Parses and validates (graph specs, nonempty grids, trials >= 1).
/// Throws std::invalid_argument / SpecError.
Manifest parse_manifest(const nlohmann::json& doc);
Manifest load_manifest(const std::string& path);

/// The manifest each lab runs when none is given.
Manifest default_manifest(const std::string& lab);

const std::vector<std::string>& lab_names();
bool is_lab(const std::string& name);

enum class Verdict { kPass, kFail, kInconclusive, kReport };
std::string to_string(Verdict v);

struct LabRow {
  std::string check;
  std::string graph;
  nlohmann::json inputs = nlohmann::json::object();
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // positive when the asserted relation holds
  double sigma = 0.0;   // combined standard error used in the verdict
  Verdict verdict = Verdict::kReport;
  std::string note;
};

/// Curves for plotting: (series, curve label) -> points.
struct SeriesPoint {
  std::string series;
  std::string curve;
  double x = 0.0;
  double y = 0.0;
};

struct SeriesInfo {
  std::string name;
  std::string x_label;
  std::string y_label;
};

struct LabReport {
  std::string experiment;
  Manifest manifest;
  std::vector<LabRow> rows;
  std::vector<SeriesInfo> series;
  std::vector<SeriesPoint> points;
  Verdict verdict = Verdict::kInconclusive;
  double wall_time_s = 0.0;

  void add_series(std::string name, std::string x_label, std::string y_label);
  void add_point(const std::string& series, const std::string& curve, double x, double y);
  /// Sets `verdict`: fail if any row fails; inconclusive if more than the
  /// allowed fraction of asserted rows is inconclusive (or nothing was
  /// asserted); pass otherwise.
  void finalize();
};

/// Exit code of the lab contract: 0 pass, 1 fail, 2 inconclusive.
int exit_code(Verdict aggregate);

LabReport lab_sharpness_sweep(const Manifest& m);
LabReport lab_threshold_locality(const Manifest& m);
LabReport lab_inequality_suite(const Manifest& m);
LabReport lab_gradual_emergence(const Manifest& m);
LabReport lab_sharp_density(const Manifest& m);
LabReport lab_geometry_audit(const Manifest& m);

/// Dispatches by name (throws std::invalid_argument for unknown labs).
LabReport run_lab(const std::string& name, const Manifest& m);

/// Exact per-sample sup_p [alpha(p + delta) - alpha(p)] over the evolution
/// curve's breakpoints.
double jump_statistic(const EvolutionCurve& curve, double delta);

/// The graphs of the default geometry suite.
const std::vector<std::string>& default_geometry_suite();

}  // namespace perclab
