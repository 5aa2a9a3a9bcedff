// perc-lab: command-line front end.
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "perclab/estimators.hpp"
#include "perclab/geometry.hpp"
#include "perclab/labs.hpp"
#include "perclab/metric.hpp"
#include "perclab/report_io.hpp"
#include "perclab/solve.hpp"
#include "perclab/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace perclab;

namespace {

constexpr int kExitError = 2;

std::uint64_t parse_u64(const std::string& text, const char* what) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || text[0] == '-')
    throw std::invalid_argument(std::string("bad ") + what + " '" + text + "'");
  return v;
}

// --seed > PERC_LAB_SEED > built-in default
std::uint64_t resolve_seed(const std::string& flag) {
  if (!flag.empty()) return parse_u64(flag, "seed");
  if (const char* env = std::getenv("PERC_LAB_SEED"); env && *env) return parse_u64(env, "PERC_LAB_SEED");
  return kDefaultSeed;
}

fs::path ensure_dir(const std::string& out) {
  fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  fs::create_directories(dir);
  return dir;
}

struct Common {
  std::string seed;
  unsigned workers = 1;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Base seed (decimal or 0x hex); overrides PERC_LAB_SEED");
  cmd->add_option("--workers", c.workers, "Worker threads (never changes results)")->check(CLI::Range(1u, 1024u));
  cmd->add_option("-o,--out", c.out, "Output directory");
}

// ---------------------------------------------------------------- graph

int cmd_graph(const std::string& spec, const Common& c) {
  const auto g = generate(spec);
  const auto profile = metric_profile(g, 0);
  const auto metrics = graph_metrics(g, profile);
  std::cout << metrics.dump() << '\n';
  if (!c.out.empty()) {
    const auto dir = ensure_dir(c.out);
    std::ofstream edges(dir / "graph.edges", std::ios::binary);
    g.write_edge_list(edges);
    write_json(metrics, dir / "metrics.json");
  }
  return 0;
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
  std::string quantity, graph;
  double p = 0.5, alpha = 0.5, r = 1.0, n = 10.0, h = 0.1, m = 10.0, t = 1.0;
  std::uint32_t u = 0, v = 1;
  std::size_t paths = 8;
  double growth_exponent = 100.0;
  std::uint64_t trials = 1000;
  double confidence = 0.95;
};

int cmd_estimate(const EstimateArgs& a, const Common& c) {
  const auto g = generate(a.graph);
  McParams mc{a.trials, resolve_seed(c.seed), c.workers, a.confidence};
  json params, result;
  const auto& q = a.quantity;
  if (q == "two-point") {
    params = {{"p", a.p}, {"u", a.u}, {"v", a.v}};
    result = to_json(two_point(g, a.p, a.u, a.v, mc));
  } else if (q == "min-two-point") {
    params = {{"p", a.p}, {"r", a.r}};
    const auto e = min_two_point_over_ball(g, a.p, a.r, mc);
    result = to_json(e.estimate);
    result["argmin"] = e.vertex;
    result["clamped"] = e.clamped;
  } else if (q == "tail") {
    params = {{"p", a.p}, {"n", a.n}};
    if (!(a.n >= 1.0)) throw std::invalid_argument("tail size must be >= 1");
    result = to_json(tail_Ko(g, a.p, static_cast<std::size_t>(std::ceil(a.n)), mc));
  } else if (q == "giant") {
    params = {{"p", a.p}, {"alpha", a.alpha}};
    result = to_json(giant_prob(g, a.p, a.alpha, mc));
  } else if (q == "mu") {
    params = {{"p", a.p}, {"h", a.h}};
    result = to_json(mu_ph(g, a.p, a.h, mc));
  } else if (q == "kappa") {
    params = {{"p", a.p}, {"m", a.m}, {"n", a.n}, {"paths", a.paths}};
    const auto k = corridor_kappa(g, a.p, a.m, a.n, a.paths, mc);
    result = to_json(k.estimate);
    result["kind"] = "upper estimate";
    result["length"] = k.length;
    result["clamped"] = k.clamped;
    result["paths_evaluated"] = k.paths_evaluated;
    result["path"] = k.path;
  } else if (q == "cost") {
    params = {{"p", a.p}, {"n", a.n}};
    const auto r = uniqueness_zone_and_cost(g, a.p, a.n, mc);
    json by_b = json::array();
    for (const auto& e : r.piv_by_b) by_b.push_back(to_json(e));
    result = {{"U", r.U},
              {"certified", r.certified},
              {"cost", r.cost},
              {"threshold", r.threshold},
              {"outer_radius", r.outer_radius},
              {"max_b", r.max_b},
              {"piv_by_b", by_b}};
    result["point"] = r.cost;
  } else if (q == "orange") {
    params = {{"n", a.n}, {"t", a.t}};
    const auto o = orange_status(g, a.n, a.t, mc);
    result = {{"orange", o.orange}, {"margin", o.margin},   {"threshold", o.threshold},
              {"p", o.p},           {"clamped", o.clamped}, {"min_two_point", to_json(o.min_two_point.estimate)},
              {"argmin", o.min_two_point.vertex}};
    result["point"] = o.min_two_point.estimate.point;
  } else if (q == "green") {
    params = {{"n", a.n}, {"t", a.t}, {"growth_exponent", a.growth_exponent}, {"paths", a.paths}};
    const auto s = green_status(g, a.n, a.t, GreenParams{a.growth_exponent, a.paths}, mc);
    result = {{"green", s.green},
              {"reason", to_string(s.reason)},
              {"orange", s.orange.orange},
              {"low_growth", s.low_growth},
              {"corridor_threshold", s.corridor_threshold},
              {"margin", s.margin},
              {"clamped", s.clamped}};
    if (s.corridor) result["corridor"] = to_json(s.corridor->estimate);
  } else {
    throw std::invalid_argument("unknown quantity '" + q + "'");
  }
  json record{{"quantity", q},       {"graph", g.spec_string()}, {"params", params}, {"trials", mc.trials},
              {"seed", mc.seed},     {"confidence", mc.confidence}, {"result", result}};
  std::cout << record.dump(2) << '\n';
  if (!c.out.empty()) write_json(record, ensure_dir(c.out) / "result.json");
  return 0;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string kind, graph;
  double tol = 0.01, alpha = 0.5, delta = 0.5;
  std::uint64_t trials = 400, max_trials = 65536;
  double confidence = 0.95;
};

int cmd_solve(const SolveArgs& a, const Common& c) {
  const auto g = generate(a.graph);
  McParams mc{a.trials, resolve_seed(c.seed), c.workers, a.confidence};
  SolveOptions opts{a.tol, a.max_trials};
  ThresholdResult r;
  json params{{"tol", a.tol}, {"max_trials", a.max_trials}};
  if (a.kind == "qG") {
    r = solve_qG(g, opts, mc);
  } else if (a.kind == "pc-alpha-delta") {
    params["alpha"] = a.alpha;
    params["delta"] = a.delta;
    r = solve_pc_alpha_delta(g, a.alpha, a.delta, opts, mc);
  } else {
    throw std::invalid_argument("unknown solve kind '" + a.kind + "'");
  }
  json record{{"kind", a.kind}, {"graph", g.spec_string()}, {"params", params},
              {"seed", mc.seed}, {"result", to_json(r)}};
  std::cout << "p = " << r.p << "  bracket [" << r.bracket_lo << ", " << r.bracket_hi << "]  trials "
            << r.trials_per_eval << (r.converged ? "" : "  (not converged)") << '\n';
  if (!c.out.empty()) write_json(record, ensure_dir(c.out) / "result.json");
  else std::cout << record.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------- lab

const char* plot_stem(const std::string& lab) {
  if (lab == "sharpness") return "sharpness_sweep";
  if (lab == "threshold-locality") return "threshold_locality";
  if (lab == "inequalities") return "inequality_suite";
  if (lab == "gradual-emergence") return "gradual_emergence";
  if (lab == "sharp-density") return "sharp_density";
  return "geometry_audit";
}

int cmd_lab(const std::string& name, const std::string& manifest_path, bool plots, const Common& c) {
  if (!is_lab(name)) {
    std::cerr << "perc-lab: unknown lab '" << name << "' (known:";
    for (const auto& n : lab_names()) std::cerr << ' ' << n;
    std::cerr << ")\n";
    return kExitError;
  }
  json doc;
  if (manifest_path.empty()) {
    doc = default_manifest(name).to_json();
    doc.erase("seed");
  } else {
    std::ifstream in(manifest_path);
    if (!in) throw std::invalid_argument("cannot open manifest " + manifest_path);
    doc = json::parse(in);
  }
  // --seed beats the manifest; the manifest beats PERC_LAB_SEED and the default.
  if (!c.seed.empty()) doc["seed"] = parse_u64(c.seed, "seed");
  else if (!doc.contains("seed")) doc["seed"] = resolve_seed("");
  if (!doc.contains("experiment")) doc["experiment"] = name;
  Manifest m = parse_manifest(doc);
  m.workers = c.workers;

  auto report = run_lab(name, m);
  const auto dir = ensure_dir(c.out);
  write_json(to_json(report), dir / "report.json");
  write_report_csv(report, dir / "report.csv");
  write_series_csv(report, dir / "series.csv");
  if (plots) {
    std::vector<std::vector<std::string>> labels;
    for (const auto& s : report.series) labels.push_back({s.name, s.x_label, s.y_label});
    plots_from_series_csv(dir / "series.csv", dir, plot_stem(name), labels);
  }
  for (const auto& row : report.rows)
    std::cout << to_string(row.verdict) << "  " << row.check << "  " << row.graph << "  lhs=" << row.lhs
              << " rhs=" << row.rhs << '\n';
  std::cout << name << ": " << to_string(report.verdict) << " (" << report.wall_time_s << " s)\n";
  return exit_code(report.verdict);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"perc-lab: percolation and geometry laboratory for finite transitive graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Common common;
  std::string graph_spec;
  auto* graph = app.add_subcommand("graph", "Generate a graph: edge list and metric summary");
  graph->add_option("spec", graph_spec, "Graph spec, e.g. torus:8x8")->required();
  add_common(graph, common);

  EstimateArgs ea;
  auto* est = app.add_subcommand("estimate", "Monte Carlo estimate of one quantity");
  est->set_help_flag("--help", "Print this help message and exit");  // --h is the ghost parameter
  est->add_option("quantity", ea.quantity, "two-point|min-two-point|tail|giant|mu|kappa|cost|orange|green")
      ->required();
  est->add_option("--graph", ea.graph, "Graph spec")->required();
  est->add_option("--p", ea.p, "Edge density");
  est->add_option("--alpha", ea.alpha, "Giant fraction");
  est->add_option("--u", ea.u, "First vertex (two-point)");
  est->add_option("--v", ea.v, "Second vertex (two-point)");
  est->add_option("--r", ea.r, "Ball radius (min-two-point)");
  est->add_option("--n", ea.n, "Scale / cluster size");
  est->add_option("--h", ea.h, "Ghost field parameter");
  est->add_option("--m", ea.m, "Corridor length");
  est->add_option("--t", ea.t, "Colouring parameter t (orange, green)");
  est->add_option("--paths", ea.paths, "Geodesics sampled for kappa");
  est->add_option("--growth-exponent", ea.growth_exponent, "Low-growth exponent (green)");
  est->add_option("--trials", ea.trials, "Trials")->check(CLI::PositiveNumber);
  est->add_option("--confidence", ea.confidence, "Interval confidence");
  add_common(est, common);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Solve for a threshold parameter");
  solve->add_option("kind", sa.kind, "qG|pc-alpha-delta")->required();
  solve->add_option("--graph", sa.graph, "Graph spec")->required();
  solve->add_option("--tol", sa.tol, "Bracket width target");
  solve->add_option("--alpha", sa.alpha, "Giant fraction (pc-alpha-delta)");
  solve->add_option("--delta", sa.delta, "Probability level (pc-alpha-delta)");
  solve->add_option("--trials", sa.trials, "Initial trials")->check(CLI::PositiveNumber);
  solve->add_option("--max-trials", sa.max_trials, "Trial cap of the doubling schedule");
  solve->add_option("--confidence", sa.confidence, "Interval confidence");
  add_common(solve, common);

  std::string lab_name, manifest;
  bool plots = false;
  auto* lab = app.add_subcommand("lab", "Run a named experiment");
  lab->add_option("name", lab_name, "sharpness|threshold-locality|inequalities|gradual-emergence|sharp-density|geometry")
      ->required();
  lab->add_option("--manifest", manifest, "Manifest JSON (defaults to the built-in one)");
  lab->add_flag("--plots", plots, "Write SVG charts derived from series.csv");
  add_common(lab, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*graph) return cmd_graph(graph_spec, common);
    if (*est) return cmd_estimate(ea, common);
    if (*solve) return cmd_solve(sa, common);
    if (*lab) return cmd_lab(lab_name, manifest, plots, common);
  } catch (const SpecError& e) {
    std::cerr << "perc-lab: " << e.what();
    if (e.position() != std::string::npos) std::cerr << " (at column " << e.position() << ")";
    std::cerr << '\n';
  } catch (const InfeasibleError& e) {
    std::cerr << "perc-lab: infeasible: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "perc-lab: " << e.what() << '\n';
  }
  return kExitError;
}
