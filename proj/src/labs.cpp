#include "perclab/labs.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "perclab/geometry.hpp"
#include "perclab/metric.hpp"
#include "perclab/parallel.hpp"
#include "perclab/solve.hpp"

namespace perclab {

using nlohmann::json;

// ---------------------------------------------------------------- manifest

double Manifest::tolerance(const std::string& name, double fallback) const {
  auto it = tolerances.find(name);
  return it == tolerances.end() ? fallback : it->second;
}

McParams Manifest::mc(std::uint64_t trials_override) const {
  McParams p;
  p.trials = trials_override ? trials_override : trials;
  p.seed = seed;
  p.workers = workers;
  p.confidence = confidence;
  return p;
}

json Manifest::to_json() const {
  json j;
  j["experiment"] = experiment;
  j["graphs"] = graphs;
  j["p"] = p;
  j["scales"] = scales;
  j["alpha"] = alpha;
  j["delta"] = delta;
  j["trials"] = trials;
  j["seed"] = seed;
  j["confidence"] = confidence;
  j["max_inconclusive_fraction"] = max_inconclusive_fraction;
  j["tolerances"] = tolerances;
  j["params"] = params;
  return j;
}

namespace {

std::uint64_t parse_seed(const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    std::size_t used = 0;
    std::uint64_t out = 0;
    try {
      out = std::stoull(s, &used, 0);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == s.size() && !s.empty()) return out;
  }
  throw std::invalid_argument("manifest seed must be a non-negative integer or an integer string");
}

template <class T>
std::vector<T> list_of(const json& doc, const char* key) {
  if (!doc.contains(key)) return {};
  const auto& v = doc.at(key);
  if (!v.is_array()) throw std::invalid_argument(std::string("manifest field '") + key + "' must be an array");
  return v.get<std::vector<T>>();
}

void collect_specs(const json& v, std::vector<std::string>& out) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) {
      if ((it.key() == "graph") && it->is_string()) out.push_back(it->get<std::string>());
      else if (it.key() == "graphs" && it->is_array()) {
        for (const auto& g : *it)
          if (g.is_string()) out.push_back(g.get<std::string>());
      } else {
        collect_specs(*it, out);
      }
    }
  } else if (v.is_array()) {
    for (const auto& x : v) collect_specs(x, out);
  }
}

// Checks that a spec parses without building large graphs twice: cayley
// files are loaded, everything else goes through the generator.
void validate_spec(const std::string& spec) { (void)generate(spec); }

}  // namespace

Manifest parse_manifest(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("manifest must be a JSON object");
  Manifest m;
  m.experiment = doc.value("experiment", std::string{});
  m.graphs = list_of<std::string>(doc, "graphs");
  m.p = list_of<double>(doc, "p");
  m.scales = list_of<double>(doc, "scales");
  m.alpha = list_of<double>(doc, "alpha");
  m.delta = list_of<double>(doc, "delta");
  if (doc.contains("trials")) {
    const auto& t = doc.at("trials");
    if (!t.is_number_integer() || t.get<std::int64_t>() < 1) throw std::invalid_argument("manifest trials must be >= 1");
    m.trials = t.get<std::uint64_t>();
  }
  if (doc.contains("seed")) m.seed = parse_seed(doc.at("seed"));
  m.confidence = doc.value("confidence", 0.95);
  if (!(m.confidence > 0.0 && m.confidence < 1.0)) throw std::invalid_argument("manifest confidence must lie in (0, 1)");
  m.max_inconclusive_fraction = doc.value("max_inconclusive_fraction", 0.2);
  if (doc.contains("tolerances")) m.tolerances = doc.at("tolerances").get<std::map<std::string, double>>();
  if (doc.contains("params")) m.params = doc.at("params");

  std::vector<std::string> specs = m.graphs;
  collect_specs(m.params, specs);
  std::sort(specs.begin(), specs.end());
  specs.erase(std::unique(specs.begin(), specs.end()), specs.end());
  for (const auto& s : specs) validate_spec(s);

  if (m.graphs.empty() && specs.empty()) throw std::invalid_argument("manifest names no graphs");
  for (const auto& [name, grid] : {std::pair{"p", &m.p}, std::pair{"alpha", &m.alpha}, std::pair{"delta", &m.delta}}) {
    for (double x : *grid)
      if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument(std::string("manifest ") + name + " values must lie in [0, 1]");
  }
  return m;
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open manifest " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("manifest is not valid JSON: ") + e.what());
  }
  return parse_manifest(doc);
}

const std::vector<std::string>& lab_names() {
  static const std::vector<std::string> names{"sharpness", "threshold-locality", "inequalities",
                                              "gradual-emergence", "sharp-density", "geometry"};
  return names;
}

bool is_lab(const std::string& name) {
  const auto& n = lab_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

const std::vector<std::string>& default_geometry_suite() {
  static const std::vector<std::string> suite{"cycle:12",   "cycle:30",    "cycle:200",       "torus:4x4",
                                              "torus:8x8",  "torus:6x10",  "torus:16x16",     "torus:4x64",
                                              "circulant:30:2,3", "circulant:20:1,5"};
  return suite;
}

Manifest default_manifest(const std::string& lab) {
  json d;
  d["experiment"] = lab;
  if (lab == "sharpness") {
    d["graphs"] = {"torus:32x32", "torus:64x64", "torus:128x128"};
    d["p"] = {0.45, 0.55, 1.0};
    d["trials"] = 400;
    d["tolerances"] = {{"sub_factor", 2.0}, {"super_span", 0.1}, {"super_floor", 0.2}};
    json grid = json::array();
    for (int i = 0; i <= 20; ++i) grid.push_back(0.3 + 0.02 * i);
    d["params"] = {{"critical_point", 0.5}, {"plot_grid", grid}};
  } else if (lab == "threshold-locality") {
    d["graphs"] = {"torus:64x64", "torus:128x128"};
    d["trials"] = 400;
    d["tolerances"] = {{"tol", 0.01}, {"window_low", 0.47}, {"window_high", 0.54}, {"trend_slack", 0.01}};
    d["params"] = {{"limit", 0.5},
                   {"max_trials", 65536},
                   {"contrast", json::array({json{{"graph", "torus:4x4096"}, {"floor", 0.7}},
                                             json{{"graph", "cycle:4096"}, {"floor", 0.95}}})},
                   {"reference", json{{"graph", "torus:64x64"}, {"ceiling", 0.55}}}};
  } else if (lab == "inequalities") {
    d["graphs"] = {"torus:32x32", "torus:64x64"};
    d["trials"] = 2000;
    d["params"] = {
        {"variance", {{"graph", "torus:32x32"}, {"p", {0.45, 0.55}}, {"n", 50}, {"trials", 2000}}},
        {"ghost", {{"graph", "torus:32x32"}, {"p", {0.6, 1.0}}, {"h", 0.02}, {"m", 100}, {"trials", 2000}}},
        {"two_arm", {{"graph", "torus:64x64"}, {"p", 0.5}, {"n", {8, 16}}, {"trials", 20000}, {"ratio", 0.75}}},
        {"point_to_point", {{"graph", "torus:32x32"}, {"p", {0.5, 0.6}}, {"n", 20}, {"r", 3}, {"trials", 2000}}}};
  } else if (lab == "gradual-emergence") {
    d["graphs"] = {"torus:64x64", "torus:4x4096"};
    d["delta"] = {0.05, 1.0};
    d["trials"] = 200;
    d["params"] = {{"expect", json::array({json{{"graph", "torus:64x64"}, {"delta", 0.05}, {"max_median", 0.35}},
                                           json{{"graph", "torus:4x4096"}, {"delta", 0.05}, {"min_median", 0.5}}})},
                   {"plot_samples", 3}};
  } else if (lab == "sharp-density") {
    d["graphs"] = {"torus:64x64", "cycle:1024"};
    d["alpha"] = {0.2, 0.5};
    d["delta"] = {0.25, 0.5};
    d["trials"] = 2000;
    d["params"] = {{"assert", json::array({json{{"graph", "torus:64x64"}, {"alpha", 0.2}, {"delta", 0.25}}})},
                   {"window", {{"graphs", {"torus:32x32", "torus:64x64", "torus:128x128"}},
                               {"alpha", 0.2},
                               {"low", 0.1},
                               {"high", 0.9},
                               {"trials", 1000}}}};
  } else if (lab == "geometry") {
    d["graphs"] = default_geometry_suite();
    d["trials"] = 1;
    d["params"] = {{"timar_instances", 20},
                   {"tubes", json::array({json{{"graph", "torus:16x16"}, {"n", 2}, {"k", 2}, {"r", 1}, {"l", 10}}})}};
  } else {
    throw std::invalid_argument("unknown lab '" + lab + "'");
  }
  return parse_manifest(d);
}

// ---------------------------------------------------------------- report

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kInconclusive: return "inconclusive";
    case Verdict::kReport: return "report";
  }
  return "report";
}

void LabReport::add_series(std::string name, std::string x_label, std::string y_label) {
  series.push_back({std::move(name), std::move(x_label), std::move(y_label)});
}

void LabReport::add_point(const std::string& s, const std::string& curve, double x, double y) {
  points.push_back({s, curve, x, y});
}

void LabReport::finalize() {
  std::size_t asserted = 0, fails = 0, unknown = 0;
  for (const auto& r : rows) {
    if (r.verdict == Verdict::kReport) continue;
    ++asserted;
    fails += r.verdict == Verdict::kFail;
    unknown += r.verdict == Verdict::kInconclusive;
  }
  if (fails > 0) verdict = Verdict::kFail;
  else if (asserted == 0) verdict = Verdict::kInconclusive;
  else if (static_cast<double>(unknown) > manifest.max_inconclusive_fraction * static_cast<double>(asserted))
    verdict = Verdict::kInconclusive;
  else verdict = Verdict::kPass;
}

int exit_code(Verdict aggregate) {
  switch (aggregate) {
    case Verdict::kPass: return 0;
    case Verdict::kFail: return 1;
    default: return 2;
  }
}

namespace {

// LHS <= RHS + 3 sigma; rows without statistical power are inconclusive.
LabRow upper_row(std::string check, std::string graph, json inputs, double lhs, double rhs, double sigma,
                 bool powered = true, std::string note = {}) {
  LabRow r{std::move(check), std::move(graph), std::move(inputs), lhs, rhs, rhs - lhs, sigma, Verdict::kReport,
           std::move(note)};
  if (!powered) r.verdict = Verdict::kInconclusive;
  else r.verdict = lhs <= rhs + 3.0 * sigma ? Verdict::kPass : Verdict::kFail;
  return r;
}

// LHS >= RHS - 3 sigma.
LabRow lower_row(std::string check, std::string graph, json inputs, double lhs, double rhs, double sigma,
                 bool powered = true, std::string note = {}) {
  LabRow r{std::move(check), std::move(graph), std::move(inputs), lhs, rhs, lhs - rhs, sigma, Verdict::kReport,
           std::move(note)};
  if (!powered) r.verdict = Verdict::kInconclusive;
  else r.verdict = lhs >= rhs - 3.0 * sigma ? Verdict::kPass : Verdict::kFail;
  return r;
}

LabRow report_row(std::string check, std::string graph, json inputs, double lhs, double rhs = 0.0,
                  std::string note = {}) {
  return LabRow{std::move(check), std::move(graph), std::move(inputs), lhs, rhs, 0.0, 0.0, Verdict::kReport,
                std::move(note)};
}

double quantile_of(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()) - 1e-9));
  return v[std::clamp<std::size_t>(k, 1, v.size()) - 1];
}

double median_of(std::vector<double> v) { return quantile_of(std::move(v), 0.5); }

std::vector<EvolutionCurve> curves_for(const FiniteGraph& g, const McParams& mc) {
  return map_trials<EvolutionCurve>(mc.trials, mc.workers, [&](std::size_t t) {
    return evolution_curve(g, sample_weights(g, mc.seed, t));
  });
}

std::uint64_t param_trials(const json& j, const Manifest& m) {
  return j.contains("trials") ? j.at("trials").get<std::uint64_t>() : m.trials;
}

std::vector<double> as_list(const json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  return {j.get<double>()};
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

}  // namespace

// ---------------------------------------------------------------- labs

LabReport lab_sharpness_sweep(const Manifest& m) {
  Timer timer;
  LabReport rep;
  rep.experiment = "sharpness";
  rep.manifest = m;
  if (m.graphs.empty() || m.p.empty()) throw std::invalid_argument("sharpness needs graphs and a p grid");
  const double pc = m.params.value("critical_point", 0.5);
  std::vector<double> grid = m.params.contains("plot_grid") ? as_list(m.params.at("plot_grid")) : m.p;
  rep.add_series("largest_cluster_density", "p", "median K1 / |V|");
  rep.add_series("largest_cluster_log", "p", "median K1 / log |V|");

  // medians[p index][graph index]
  std::vector<std::vector<double>> med_log(m.p.size()), med_density(m.p.size());
  for (const auto& spec : m.graphs) {
    const auto g = generate(spec);
    const double nv = static_cast<double>(g.vertex_count());
    const double logv = std::log(nv);
    const auto curves = curves_for(g, m.mc());
    for (std::size_t i = 0; i < m.p.size(); ++i) {
      std::vector<double> k1, dens, lg;
      for (const auto& c : curves) {
        const double k = static_cast<double>(c.k1_at(m.p[i]));
        k1.push_back(k);
        dens.push_back(k / nv);
        lg.push_back(k / logv);
      }
      med_log[i].push_back(median_of(lg));
      med_density[i].push_back(median_of(dens));
      rep.rows.push_back(report_row("k1_quantiles", spec,
                                    {{"p", m.p[i]},
                                     {"q10", quantile_of(k1, 0.1)},
                                     {"q50", quantile_of(k1, 0.5)},
                                     {"q90", quantile_of(k1, 0.9)},
                                     {"median_k1_over_log_v", med_log[i].back()},
                                     {"median_density", med_density[i].back()}},
                                    med_log[i].back(), med_density[i].back()));
    }
    for (double p : grid) {
      std::vector<double> dens, lg;
      for (const auto& c : curves) {
        dens.push_back(static_cast<double>(c.k1_at(p)) / nv);
        lg.push_back(static_cast<double>(c.k1_at(p)) / logv);
      }
      rep.add_point("largest_cluster_density", spec, p, median_of(dens));
      rep.add_point("largest_cluster_log", spec, p, median_of(lg));
    }
  }
  const double factor = m.tolerance("sub_factor", 2.0);
  const double span = m.tolerance("super_span", 0.1);
  const double floor = m.tolerance("super_floor", 0.2);
  for (std::size_t i = 0; i < m.p.size(); ++i) {
    const auto [lo_it, hi_it] = std::minmax_element(med_log[i].begin(), med_log[i].end());
    const auto [dlo, dhi] = std::minmax_element(med_density[i].begin(), med_density[i].end());
    const json in{{"p", m.p[i]}, {"sizes", m.graphs}};
    if (m.p[i] >= 1.0) {
      rep.rows.push_back(upper_row("full_density_exact", "family", in, 1.0 - *dlo, 0.0, 0.0, true,
                                   "every edge open: density must be 1"));
    } else if (m.p[i] < pc) {
      const double ratio = *lo_it > 0 ? *hi_it / *lo_it : std::numeric_limits<double>::infinity();
      rep.rows.push_back(upper_row("subcritical_log_scaling", "family", in, ratio, factor, 0.0, true,
                                   "max/min of median K1/log|V| across sizes"));
    } else {
      rep.rows.push_back(upper_row("supercritical_density_span", "family", in, *dhi - *dlo, span, 0.0, true,
                                   "max - min of median K1/|V| across sizes"));
      rep.rows.push_back(lower_row("supercritical_density_floor", "family", in, *dlo, floor, 0.0, true,
                                   "smallest median K1/|V| across sizes"));
    }
  }
  rep.finalize();
  rep.wall_time_s = timer.seconds();
  return rep;
}

LabReport lab_threshold_locality(const Manifest& m) {
  Timer timer;
  LabReport rep;
  rep.experiment = "threshold-locality";
  rep.manifest = m;
  SolveOptions opts;
  opts.tol = m.tolerance("tol", 0.01);
  opts.max_trials = m.params.value("max_trials", std::uint64_t{65536});
  const double limit = m.params.value("limit", 0.5);
  const double wlo = m.tolerance("window_low", 0.47), whi = m.tolerance("window_high", 0.54);
  const double slack = m.tolerance("trend_slack", 0.01);
  rep.add_series("qG", "family index", "q(G)");

  std::map<std::string, ThresholdResult> solved;
  auto solve = [&](const std::string& spec) -> const ThresholdResult& {
    auto it = solved.find(spec);
    if (it != solved.end()) return it->second;
    const auto g = generate(spec);
    auto r = solve_qG(g, opts, m.mc());
    rep.rows.push_back(report_row("qG", spec,
                                  {{"bracket_lo", r.bracket_lo},
                                   {"bracket_hi", r.bracket_hi},
                                   {"trials", r.trials_per_eval},
                                   {"converged", r.converged},
                                   {"estimate_at_q", r.estimate_at_p.point}},
                                  r.p, 0.0, r.target));
    return solved.emplace(spec, std::move(r)).first->second;
  };

  double previous = -1.0;
  for (std::size_t i = 0; i < m.graphs.size(); ++i) {
    const auto& r = solve(m.graphs[i]);
    rep.add_point("qG", "family", static_cast<double>(i), r.p);
    rep.rows.push_back(lower_row("window_low", m.graphs[i], {{"q", r.p}}, r.p, wlo, 0.0, r.converged));
    rep.rows.push_back(upper_row("window_high", m.graphs[i], {{"q", r.p}}, r.p, whi, 0.0, r.converged));
    const double dev = std::abs(r.p - limit);
    if (previous >= 0.0)
      rep.rows.push_back(upper_row("approaches_limit", m.graphs[i], {{"deviation", dev}, {"previous", previous}},
                                   dev, previous + slack, 0.0, r.converged));
    previous = dev;
  }
  if (m.params.contains("contrast")) {
    for (const auto& c : m.params.at("contrast")) {
      const auto spec = c.at("graph").get<std::string>();
      const auto& r = solve(spec);
      rep.add_point("qG", "contrast", static_cast<double>(rep.points.size()), r.p);
      rep.rows.push_back(lower_row("contrast_floor", spec, {{"q", r.p}}, r.p, c.at("floor").get<double>(), 0.0,
                                   r.converged));
    }
  }
  if (m.params.contains("reference")) {
    const auto& c = m.params.at("reference");
    const auto spec = c.at("graph").get<std::string>();
    const auto& r = solve(spec);
    rep.rows.push_back(upper_row("reference_ceiling", spec, {{"q", r.p}}, r.p, c.at("ceiling").get<double>(), 0.0,
                                 r.converged));
  }
  rep.finalize();
  rep.wall_time_s = timer.seconds();
  return rep;
}

namespace {

void variance_rows(LabReport& rep, const Manifest& m, const json& cfg) {
  const auto spec = cfg.at("graph").get<std::string>();
  const auto g = generate(spec);
  const auto n = cfg.at("n").get<std::size_t>();
  const auto mc = m.mc(param_trials(cfg, m));
  for (double p : as_list(cfg.at("p"))) {
    const auto sizes = map_trials<double>(mc.trials, mc.workers, [&](std::size_t t) {
      const auto report = clusters(g, config_at(sample_weights(g, mc.seed, t), p));
      double x = 0.0;
      for (auto s : report.sizes)
        if (s >= n) x += static_cast<double>(s);
      return x;
    });
    const double N = static_cast<double>(sizes.size());
    double mean = 0.0;
    for (double x : sizes) mean += x;
    mean /= N;
    double m2 = 0.0, m4 = 0.0;
    for (double x : sizes) {
      const double d = x - mean;
      m2 += d * d;
      m4 += d * d * d * d;
    }
    const double var = N > 1 ? m2 / (N - 1.0) : 0.0;
    m4 /= N;
    const double pop_var = m2 / N;
    const double se_var = std::sqrt(std::max(0.0, m4 - pop_var * pop_var) / N);
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    const double se_rhs = nn * std::sqrt(var / N);
    const double sigma = std::sqrt(se_var * se_var + se_rhs * se_rhs);
    rep.rows.push_back(upper_row("variance_bound", spec, {{"p", p}, {"n", n}, {"trials", mc.trials}, {"mean", mean}},
                                 var, nn * mean, sigma, true, "Var|X| <= n^2 E|X|, X = {u : |K_u| >= n}"));
  }
}

void ghost_rows(LabReport& rep, const Manifest& m, const json& cfg) {
  const auto spec = cfg.at("graph").get<std::string>();
  const auto g = generate(spec);
  const double h = cfg.at("h").get<double>();
  const auto size = cfg.at("m").get<std::size_t>();
  const auto base = m.mc(param_trials(cfg, m));
  for (double p : as_list(cfg.at("p"))) {
    const json in{{"p", p}, {"h", h}, {"m", size}, {"trials", base.trials}};
    if (p >= 1.0) {
      rep.rows.push_back(report_row("ghost_tail_comparison", spec, in, 1.0, 1.0, "degenerate p = 1 skipped"));
      continue;
    }
    McParams a = base, b = base, c = base;
    a.seed = derive_seed(base.seed, 1);
    b.seed = derive_seed(base.seed, 2);
    c.seed = derive_seed(base.seed, 3);
    const auto mu = mu_ph(g, p, h, a);
    const auto tail = tail_Ko(g, p, size, b);
    const auto low = tail_Ko(g, (1.0 - mu.point) * p, size, c);
    const double decay = std::exp(-h * static_cast<double>(size));
    const double one_minus = 1.0 - mu.point;
    const bool powered = one_minus > 0.0 && tail.sum >= 10.0;
    double rhs = 0.0, sigma = low.std_error;
    if (one_minus > 0.0) {
      rhs = tail.point * decay / one_minus;
      const double d_tail = decay / one_minus;
      const double d_mu = tail.point * decay / (one_minus * one_minus);
      sigma = std::sqrt(low.std_error * low.std_error + d_tail * d_tail * tail.std_error * tail.std_error +
                        d_mu * d_mu * mu.std_error * mu.std_error);
    }
    auto in2 = in;
    in2["mu"] = mu.point;
    in2["tail_at_p"] = tail.point;
    rep.rows.push_back(upper_row("ghost_tail_comparison", spec, in2, low.point, rhs, sigma, powered,
                                 powered ? "" : "tail at p below the noise floor"));
  }
}

void two_arm_rows(LabReport& rep, const Manifest& m, const json& cfg) {
  const auto spec = cfg.at("graph").get<std::string>();
  const auto g = generate(spec);
  const double p = cfg.at("p").get<double>();
  const auto ns = as_list(cfg.at("n"));
  const double bound = cfg.value("ratio", 0.75);
  const auto mc = m.mc(param_trials(cfg, m));
  const EdgeId e = 0;
  // per trial, bit 2i: T_{e,n_i}, bit 2i+1: T_{e,4 n_i}
  const auto bits = map_trials<std::uint64_t>(mc.trials, mc.workers, [&](std::size_t t) {
    const auto report = clusters(g, config_at(sample_weights(g, mc.seed, t), p));
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const auto n = static_cast<std::size_t>(ns[i]);
      if (two_arm_event(g, report, e, n)) out |= std::uint64_t{1} << (2 * i);
      if (two_arm_event(g, report, e, 4 * n)) out |= std::uint64_t{1} << (2 * i + 1);
    }
    return out;
  });
  for (std::size_t i = 0; i < ns.size(); ++i) {
    double small = 0, large = 0;
    for (auto b : bits) {
      small += (b >> (2 * i)) & 1;
      large += (b >> (2 * i + 1)) & 1;
    }
    const double floor = 10.0;
    const bool powered = small >= floor && large >= floor;
    const double ratio = small > 0 ? large / small : 0.0;
    const double sigma = small > 0 ? std::sqrt(ratio * (1.0 - ratio) / small) : 0.0;
    rep.rows.push_back(upper_row("two_arm_decay", spec,
                                 {{"p", p},
                                  {"n", ns[i]},
                                  {"trials", mc.trials},
                                  {"p_T_n", small / static_cast<double>(mc.trials)},
                                  {"p_T_4n", large / static_cast<double>(mc.trials)}},
                                 ratio, bound, sigma, powered,
                                 powered ? "P(T_4n)/P(T_n) as a conditional frequency" : "counts below noise floor"));
  }
}

void point_to_point_rows(LabReport& rep, const Manifest& m, const json& cfg) {
  const auto spec = cfg.at("graph").get<std::string>();
  const auto g = generate(spec);
  const auto n = cfg.at("n").get<std::size_t>();
  const double r = cfg.at("r").get<double>();
  const auto mc = m.mc(param_trials(cfg, m));
  const auto members = ball(g, kRoot, r);
  for (double p : as_list(cfg.at("p"))) {
    // per trial: bit0 |K_o| >= n; per member two bits (connected, both large but apart)
    const auto rows = map_trials<std::vector<std::uint8_t>>(mc.trials, mc.workers, [&](std::size_t t) {
      const auto report = clusters(g, config_at(sample_weights(g, mc.seed, t), p));
      std::vector<std::uint8_t> out(members.size() + 1);
      const bool big_o = report.size_of_vertex(kRoot) >= n;
      out[0] = big_o;
      for (std::size_t i = 0; i < members.size(); ++i) {
        const auto u = members[i];
        const bool joined = report.label[u] == report.label[kRoot];
        const bool apart = !joined && big_o && report.size_of_vertex(u) >= n;
        out[i + 1] = static_cast<std::uint8_t>(joined | (apart << 1));
      }
      return out;
    });
    const double N = static_cast<double>(mc.trials);
    double big = 0;
    std::vector<double> joined(members.size(), 0), apart(members.size(), 0);
    for (const auto& row : rows) {
      big += row[0];
      for (std::size_t i = 0; i < members.size(); ++i) {
        joined[i] += row[i + 1] & 1;
        apart[i] += (row[i + 1] >> 1) & 1;
      }
    }
    const double tail = big / N;
    std::size_t worst = 0;
    double worst_val = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < members.size(); ++i) {
      const double v = (joined[i] + apart[i]) / N;
      if (v < worst_val) {
        worst_val = v;
        worst = i;
      }
    }
    const double se_sum = std::sqrt(worst_val * (1.0 - worst_val) / N);
    const double se_sq = 2.0 * tail * std::sqrt(tail * (1.0 - tail) / N);
    rep.rows.push_back(upper_row("point_to_point", spec,
                                 {{"p", p}, {"n", n}, {"r", r}, {"trials", mc.trials}, {"argmin", members[worst]}},
                                 tail * tail, worst_val, std::sqrt(se_sum * se_sum + se_sq * se_sq), true,
                                 "P(|K_o|>=n)^2 <= min_u P(o<->u) + P(both large, apart)"));
  }
}

}  // namespace

LabReport lab_inequality_suite(const Manifest& m) {
  Timer timer;
  LabReport rep;
  rep.experiment = "inequalities";
  rep.manifest = m;
  const auto& p = m.params;
  if (p.contains("variance")) variance_rows(rep, m, p.at("variance"));
  if (p.contains("ghost")) ghost_rows(rep, m, p.at("ghost"));
  if (p.contains("two_arm")) two_arm_rows(rep, m, p.at("two_arm"));
  if (p.contains("point_to_point")) point_to_point_rows(rep, m, p.at("point_to_point"));
  rep.finalize();
  rep.wall_time_s = timer.seconds();
  return rep;
}

double jump_statistic(const EvolutionCurve& curve, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("sprinkle delta must be > 0");
  const auto& w = curve.breakpoints;
  const auto& k1 = curve.k1_at_step;
  const double nv = static_cast<double>(curve.vertex_count);
  // p = 0 (nothing open) against p + delta = delta
  const auto top0 = static_cast<std::size_t>(std::upper_bound(w.begin(), w.end(), delta) - w.begin());
  std::uint32_t best = k1[top0] - k1[0];
  // p + delta landing exactly on breakpoint j; alpha(p) counts weights <= w_j - delta
  std::size_t lo = 0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double p = w[j] - delta;
    if (p <= 0.0) continue;
    while (lo < w.size() && w[lo] <= p) ++lo;
    std::size_t hi = j + 1;
    while (hi < w.size() && w[hi] == w[j]) ++hi;
    best = std::max(best, k1[hi] - k1[lo]);
  }
  return static_cast<double>(best) / nv;
}

LabReport lab_gradual_emergence(const Manifest& m) {
  Timer timer;
  LabReport rep;
  rep.experiment = "gradual-emergence";
  rep.manifest = m;
  if (m.delta.empty()) throw std::invalid_argument("gradual emergence needs a delta grid");
  rep.add_series("alpha_curves", "p", "K1 / |V|");
  const std::size_t plot_samples = m.params.value("plot_samples", std::size_t{3});
  for (const auto& spec : m.graphs) {
    const auto g = generate(spec);
    const auto curves = curves_for(g, m.mc());
    for (std::size_t s = 0; s < std::min(plot_samples, curves.size()); ++s) {
      const auto& c = curves[s];
      const std::string label = spec + " sample " + std::to_string(s);
      for (int i = 0; i <= 100; ++i) rep.add_point("alpha_curves", label, i / 100.0, c.alpha(i / 100.0));
    }
    for (double d : m.delta) {
      std::vector<double> js;
      for (const auto& c : curves) js.push_back(jump_statistic(c, d));
      const double med = median_of(js);
      const json in{{"delta", d}, {"trials", m.trials}, {"q10", quantile_of(js, 0.1)}, {"q90", quantile_of(js, 0.9)}};
      if (d >= 1.0) {
        const double exact = 1.0 - 1.0 / static_cast<double>(g.vertex_count());
        std::size_t mismatches = 0;
        for (double j : js) mismatches += j != exact;
        auto row = upper_row("full_sweep_exact", spec, in, static_cast<double>(mismatches), 0.0, 0.0, true,
                             "samples with J(1) != 1 - 1/|V|");
        rep.rows.push_back(row);
      }
      rep.rows.push_back(report_row("median_jump", spec, in, med));
      if (m.params.contains("expect")) {
        for (const auto& e : m.params.at("expect")) {
          if (e.at("graph").get<std::string>() != spec || e.at("delta").get<double>() != d) continue;
          if (e.contains("max_median"))
            rep.rows.push_back(upper_row("median_jump_ceiling", spec, in, med, e.at("max_median").get<double>(), 0.0));
          if (e.contains("min_median"))
            rep.rows.push_back(lower_row("median_jump_floor", spec, in, med, e.at("min_median").get<double>(), 0.0));
        }
      }
    }
  }
  rep.finalize();
  rep.wall_time_s = timer.seconds();
  return rep;
}

LabReport lab_sharp_density(const Manifest& m) {
  Timer timer;
  LabReport rep;
  rep.experiment = "sharp-density";
  rep.manifest = m;
  if (m.alpha.empty() || m.delta.empty()) throw std::invalid_argument("sharp density needs alpha and delta grids");
  auto asserted = [&](const std::string& spec, double a, double d) {
    if (!m.params.contains("assert")) return false;
    for (const auto& e : m.params.at("assert"))
      if (e.at("graph").get<std::string>() == spec && e.at("alpha").get<double>() == a &&
          e.at("delta").get<double>() == d)
        return true;
    return false;
  };
  for (const auto& spec : m.graphs) {
    const auto g = generate(spec);
    for (double a : m.alpha) {
      auto crit = critical_samples(g, size_threshold(a, g.vertex_count()), 0, m.trials, m.mc());
      std::sort(crit.begin(), crit.end());
      for (double d : m.delta) {
        if (!(d > 0.0 && d <= 0.5)) throw std::invalid_argument("sharp density delta must lie in (0, 1/2]");
        const auto lo = quantile_bracket(crit, d, m.confidence);
        const auto hi = quantile_bracket(crit, 1.0 - d, m.confidence);
        const double ratio = hi.point / lo.point;
        const double bound = std::exp(d);
        const json in{{"alpha", a},
                      {"delta", d},
                      {"pc_delta", lo.point},
                      {"pc_one_minus_delta", hi.point},
                      {"ratio_low", hi.lo / lo.hi},
                      {"ratio_high", hi.hi / lo.lo}};
        if (d == 0.5) {
          rep.rows.push_back(upper_row("ratio_at_half", spec, in, std::abs(ratio - 1.0), 0.0, 0.0, true,
                                       "p_c(alpha, 1/2) / p_c(alpha, 1/2) must be exactly 1"));
        } else if (asserted(spec, a, d)) {
          LabRow row = upper_row("sharp_density_ratio", spec, in, ratio, bound, 0.0);
          if (row.verdict == Verdict::kFail && hi.lo / lo.hi <= bound) row.verdict = Verdict::kInconclusive;
          rep.rows.push_back(row);
        } else {
          rep.rows.push_back(report_row("sharp_density_ratio", spec, in, ratio, bound, "reported, not asserted"));
        }
      }
    }
  }
  if (m.params.contains("window")) {
    const auto& w = m.params.at("window");
    const double a = w.at("alpha").get<double>();
    const double qlo = w.value("low", 0.1), qhi = w.value("high", 0.9);
    const auto mc = m.mc(param_trials(w, m));
    rep.add_series("window_width", "log |V|", "p-window 0.1 -> 0.9");
    double previous = std::numeric_limits<double>::infinity();
    for (const auto& spec : w.at("graphs").get<std::vector<std::string>>()) {
      const auto g = generate(spec);
      auto crit = critical_samples(g, size_threshold(a, g.vertex_count()), 0, mc.trials, mc);
      std::sort(crit.begin(), crit.end());
      const double width = quantile_of(crit, qhi) - quantile_of(crit, qlo);
      const double logv = std::log(static_cast<double>(g.vertex_count()));
      rep.add_point("window_width", "alpha " + std::to_string(a), logv, width);
      const json in{{"alpha", a}, {"width", width}, {"width_times_log_v", width * logv}, {"trials", mc.trials}};
      if (std::isfinite(previous))
        rep.rows.push_back(upper_row("window_shrinks", spec, in, width, previous, 0.0, true,
                                     "width of the 0.1 -> 0.9 window must decrease with |V|"));
      else
        rep.rows.push_back(report_row("window_width", spec, in, width));
      previous = width;
    }
  }
  rep.finalize();
  rep.wall_time_s = timer.seconds();
  return rep;
}

LabReport lab_geometry_audit(const Manifest& m) {
  Timer timer;
  LabReport rep;
  rep.experiment = "geometry";
  rep.manifest = m;
  const int instances = m.params.value("timar_instances", 20);
  rep.add_series("gh_bounds", "graph index", "dist_GH bound");
  for (std::size_t gi = 0; gi < m.graphs.size(); ++gi) {
    const auto& spec = m.graphs[gi];
    const auto g = generate(spec);
    const auto profile = metric_profile(g, kRoot);
    const int D = profile.diameter;

    std::size_t bad_r = 0, tested_r = 0;
    for (int r = 1; 4 * r + 2 <= D; ++r) {
      ++tested_r;
      const auto inner = ball(profile, r);
      std::vector<VertexId> outside;
      for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (profile.distances[v] > 2 * r) outside.push_back(v);
      if (removal_components(g, inner, outside).disconnects()) ++bad_r;
    }
    rep.rows.push_back(upper_row("ball_removal", spec, {{"radii_tested", tested_r}}, static_cast<double>(bad_r), 0.0,
                                 0.0, true, "radii where B_r disconnects the complement of B_2r"));

    std::size_t bad_n = 0, tested_n = 0;
    for (int n = 1; 3 * n <= D; ++n) {
      const auto ex = exposed_sphere(g, kRoot, n);
      if (ex.sphere_out_of_range) continue;
      ++tested_n;
      const auto far = sphere(profile, 2 * n + 1);
      const VertexId root[] = {kRoot};
      const auto audit = cutset_audit(g, ex.members, root, far);
      if (!audit.is_cutset || !audit.is_minimal) ++bad_n;
    }
    rep.rows.push_back(upper_row("exposed_sphere_minimal_cutset", spec, {{"scales_tested", tested_n}},
                                 static_cast<double>(bad_n), 0.0, 0.0, true, "scales where the audit failed"));

    const auto bracket = delta_bracket(g);
    rep.rows.push_back(report_row("delta_bracket", spec,
                                  {{"determined", bracket.determined},
                                   {"lower", bracket.delta_lower},
                                   {"upper", bracket.delta_upper},
                                   {"rank", bracket.rank_full},
                                   {"generating_radius", bracket.generating_radius},
                                   {"note", bracket.note}},
                                  bracket.delta_lower, bracket.delta_upper));

    std::size_t bad_t = 0, tested_t = 0;
    if (bracket.determined && !bracket.trivial) {
      for (int i = 0; i < instances; ++i) {
        const auto inst = random_minimal_cutset(g, derive_seed(m.seed, gi * 1000 + i));
        if (!inst) continue;
        ++tested_t;
        const auto audit = cutset_audit(g, inst->cutset, inst->source, inst->target);
        const auto rc = is_r_connected(g, inst->cutset, bracket.delta_upper);
        if (!audit.is_minimal || !rc.connected) ++bad_t;
      }
    }
    rep.rows.push_back(upper_row("cutset_r_connected", spec, {{"instances", tested_t}, {"r", bracket.delta_upper}},
                                 static_cast<double>(bad_t), 0.0, 0.0, tested_t > 0,
                                 tested_t > 0 ? "instances failing the check" : "delta not determined"));

    const auto up = gh_circle_upper(g);
    const auto low = gh_circle_lower(g);
    const bool verified = verify_upper(g, up) && verify_lower(g, low);
    rep.rows.push_back(upper_row("gh_sandwich", spec,
                                 {{"upper_trivial", up.trivial}, {"verified", verified}, {"diameter", D}},
                                 low.value, up.value, 0.0, true, "GH lower bound <= upper bound"));
    json witness{{"upper_value", up.value}, {"lower_value", low.value}};
    if (up.cycle)
      witness["cycle"] = {{"length", up.cycle->cycle.size()}, {"density", up.cycle->density}, {"defect", up.cycle->defect}};
    if (!low.trivial)
      witness["packing"] = {{"points", low.packing.size()}, {"separation", low.separation}, {"epsilon", low.epsilon}};
    rep.rows.push_back(upper_row("gh_certificates_verify", spec, witness, verified ? 0.0 : 1.0, 0.0, 0.0));
    rep.add_point("gh_bounds", "upper", static_cast<double>(gi), up.value);
    rep.add_point("gh_bounds", "lower", static_cast<double>(gi), low.value);

    const auto gq = gamma_quantities(g, up, low);
    std::string cls;
    if (gq.circle_like_fast) cls = "circle-like fast";
    else if (low.value >= 0.2) cls = "not circle-like";
    else if (!up.trivial) cls = "stretched";
    else cls = "undetermined";
    rep.rows.push_back(report_row("one_dimensionality", spec,
                                  {{"class", cls},
                                   {"gamma_low", gq.gamma_low},
                                   {"gamma_high", gq.gamma_high},
                                   {"log_gamma_plus_low", gq.log_gamma_plus_low},
                                   {"log_gamma_plus_high", gq.log_gamma_plus_high},
                                   {"exceeds_graph", gq.exceeds_graph}},
                                  low.value, up.value, cls));
  }
  if (m.params.contains("tubes")) {
    for (const auto& t : m.params.at("tubes")) {
      const auto spec = t.at("graph").get<std::string>();
      const auto g = generate(spec);
      const int n = t.at("n"), k = t.at("k"), r = t.at("r"), l = t.at("l");
      const auto fam = plentiful_tubes(g, kRoot, n, k, r, l);
      const auto profile = metric_profile(g, kRoot);
      const bool ok = verify_tubes(g, fam, sphere(profile, n), sphere(profile, 4 * n));
      rep.rows.push_back(lower_row("plentiful_tubes", spec, {{"n", n}, {"k", k}, {"r", r}, {"l", l}, {"verified", ok}},
                                   ok ? static_cast<double>(fam.tubes.size()) : 0.0, k, 0.0));
    }
  }
  rep.finalize();
  rep.wall_time_s = timer.seconds();
  return rep;
}

LabReport run_lab(const std::string& name, const Manifest& m) {
  if (name == "sharpness") return lab_sharpness_sweep(m);
  if (name == "threshold-locality") return lab_threshold_locality(m);
  if (name == "inequalities") return lab_inequality_suite(m);
  if (name == "gradual-emergence") return lab_gradual_emergence(m);
  if (name == "sharp-density") return lab_sharp_density(m);
  if (name == "geometry") return lab_geometry_audit(m);
  throw std::invalid_argument("unknown lab '" + name + "'");
}

}  // namespace perclab
