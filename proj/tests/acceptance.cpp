// Acceptance run: one PASS/FAIL line per criterion, runtime included.
// Exits 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "perclab/estimators.hpp"
#include "perclab/geometry.hpp"
#include "perclab/labs.hpp"
#include "perclab/metric.hpp"
#include "perclab/percolation.hpp"
#include "perclab/report_io.hpp"
#include "perclab/solve.hpp"

using namespace perclab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

McParams mc(std::uint64_t trials, unsigned workers = 1) {
  McParams p;
  p.trials = trials;
  p.workers = workers;
  return p;
}

// BFS labelling in vertex order: labels are dense and numbered by smallest
// member, the same convention as the union-find report.
std::vector<std::uint32_t> bfs_labels(const FiniteGraph& g, const Config& c) {
  const std::uint32_t none = ~0u;
  std::vector<std::uint32_t> label(g.vertex_count(), none);
  std::uint32_t next = 0;
  for (VertexId s = 0; s < g.vertex_count(); ++s) {
    if (label[s] != none) continue;
    std::vector<VertexId> queue{s};
    label[s] = next;
    for (std::size_t i = 0; i < queue.size(); ++i)
      for (auto w : g.neighbors(queue[i])) {
        if (label[w] != none || !c.open[*g.edge_id(queue[i], w)]) continue;
        label[w] = next;
        queue.push_back(w);
      }
    ++next;
  }
  return label;
}

std::vector<const LabRow*> rows(const LabReport& r, const std::string& check) {
  std::vector<const LabRow*> out;
  for (const auto& row : r.rows)
    if (row.check == check) out.push_back(&row);
  return out;
}

// Every selected row passes; at least one is asserted.
bool all_pass(const std::vector<const LabRow*>& rs) {
  bool any = false;
  for (auto* r : rs) {
    if (r->verdict == Verdict::kFail) return false;
    any |= r->verdict == Verdict::kPass;
  }
  return any;
}

std::string stable_dump(const LabReport& r) {
  auto j = to_json(r);
  j["provenance"].erase("wall_time_s");
  return j.dump();
}

Manifest inequality_section(const std::string& key, unsigned workers = 1) {
  auto m = default_manifest("inequalities");
  const auto section = m.params.at(key);
  m.params = nlohmann::json::object();
  m.params[key] = section;
  m.workers = workers;
  return m;
}

std::map<std::string, ThresholdResult> solved_qG;

const ThresholdResult& qG(const std::string& spec) {
  auto it = solved_qG.find(spec);
  if (it != solved_qG.end()) return it->second;
  SolveOptions opts;
  opts.tol = 0.01;
  opts.max_trials = 65536;
  return solved_qG.emplace(spec, solve_qG(generate(spec), opts, mc(400))).first->second;
}

Outcome c1() {
  std::size_t mismatches = 0, checked = 0;
  for (const char* spec : {"cycle:8", "torus:4x4", "circulant:12:1,3"}) {
    const auto g = generate(spec);
    for (std::uint64_t t = 0; t < 50; ++t) {
      const auto s = sample_weights(g, kDefaultSeed, t);
      const auto c = config_at(s, 0.2 + 0.6 * static_cast<double>(t) / 49.0);
      const auto uf = clusters(g, c);
      const auto ref = bfs_labels(g, c);
      std::vector<std::size_t> sizes;
      for (auto l : ref) {
        if (l >= sizes.size()) sizes.resize(l + 1, 0);
        ++sizes[l];
      }
      ++checked;
      mismatches += uf.label != ref || uf.sizes != sizes;
    }
  }
  const auto est = giant_prob(generate("cycle:4"), 0.5, 0.5, mc(10000));
  const double exact = 0.9375;
  const double sigma = std::sqrt(exact * (1 - exact) / 10000.0);
  const double dev = std::abs(est.point - exact);
  return {mismatches == 0 && dev <= 3 * sigma,
          std::to_string(checked) + " configs, " + std::to_string(mismatches) + " mismatches; giant " +
              fmt("%.4f", est.point) + " vs 0.9375 (|dev| " + fmt("%.4f", dev) + " <= 3sigma " +
              fmt("%.4f", 3 * sigma) + ")"};
}

Outcome c2() {
  const double exact = std::pow(0.8, 10) + std::pow(0.8, 90) - std::pow(0.8, 100);
  const auto est = two_point(generate("cycle:100"), 0.8, 0, 10, mc(10000));
  const double sigma = std::sqrt(exact * (1 - exact) / 10000.0);
  const double dev = std::abs(est.point - exact);
  return {dev <= 3 * sigma, "estimate " + fmt("%.5f", est.point) + " vs " + fmt("%.5f", exact) + " (|dev| " +
                                fmt("%.5f", dev) + " <= 3sigma " + fmt("%.5f", 3 * sigma) + ")"};
}

Outcome c3() {
  const auto& a = qG("torus:64x64");
  const auto& b = qG("torus:128x128");
  const bool window = a.p >= 0.47 && a.p <= 0.54 && b.p >= 0.47 && b.p <= 0.54;
  const bool trend = std::abs(b.p - 0.5) <= std::abs(a.p - 0.5) + 0.01;
  const bool conv = a.converged && b.converged;
  return {window && trend && conv, "q(64^2) " + fmt("%.4f", a.p) + ", q(128^2) " + fmt("%.4f", b.p) +
                                       "; window [0.47,0.54] " + (window ? "ok" : "violated") + ", trend " +
                                       (trend ? "ok" : "violated") + (conv ? "" : ", not converged")};
}

Outcome c4() {
  const auto& s = qG("torus:4x4096");
  const auto& t = qG("torus:64x64");
  const bool floor = s.p >= 0.7, ceiling = t.p <= 0.55;
  return {floor && ceiling, "q(4x4096) " + fmt("%.4f", s.p) + (floor ? " >= 0.7" : " < 0.7") + ", q(64^2) " +
                                fmt("%.4f", t.p) + (ceiling ? " <= 0.55" : " > 0.55")};
}

Outcome c5() {
  const auto r = run_lab("sharpness", default_manifest("sharpness"));
  const auto sub = rows(r, "subcritical_log_scaling");
  const auto span = rows(r, "supercritical_density_span");
  const auto floor = rows(r, "supercritical_density_floor");
  const bool ok = all_pass(sub) && all_pass(span) && all_pass(floor);
  return {ok, "factor " + fmt("%.3f", sub.at(0)->lhs) + " (<= 2), span " + fmt("%.4f", span.at(0)->lhs) +
                  " (<= 0.1), floor " + fmt("%.4f", floor.at(0)->lhs) + " (> 0.2)"};
}

Outcome lab_rows(const Manifest& m, const std::string& check, const std::string& what) {
  const auto r = run_lab("inequalities", m);
  const auto rs = rows(r, check);
  std::string d;
  for (auto* row : rs) {
    if (row->verdict == Verdict::kReport) continue;
    d += (d.empty() ? "" : "; ") + what + " " + row->inputs.dump() + ": " + fmt("%.5g", row->lhs) + " vs " +
         fmt("%.5g", row->rhs) + " + 3*" + fmt("%.3g", row->sigma) + " " + to_string(row->verdict);
  }
  return {all_pass(rs), d};
}

Outcome c6() {
  return lab_rows(inequality_section("variance"), "variance_bound", "var");
}

Outcome c7() {
  auto m = inequality_section("ghost");
  m.params["ghost"]["p"] = {0.6};
  return lab_rows(m, "ghost_tail_comparison", "ghost");
}

Outcome c8() {
  return lab_rows(inequality_section("two_arm"), "two_arm_decay", "ratio");
}

// Cycles of diameter <= 2 in torus:4x4: 16 unit squares, 4 rows, 4 columns.
std::size_t torus4_short_cycle_rank(const FiniteGraph& g) {
  auto id = [](int x, int y) { return static_cast<VertexId>(((x + 4) % 4) * 4 + (y + 4) % 4); };
  auto e = [&](VertexId a, VertexId b) { return *g.edge_id(a, b); };
  std::vector<std::vector<EdgeId>> cyc;
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y)
      cyc.push_back({e(id(x, y), id(x + 1, y)), e(id(x + 1, y), id(x + 1, y + 1)), e(id(x + 1, y + 1), id(x, y + 1)),
                     e(id(x, y + 1), id(x, y))});
  for (int k = 0; k < 4; ++k) {
    std::vector<EdgeId> row, col;
    for (int i = 0; i < 4; ++i) {
      row.push_back(e(id(k, i), id(k, i + 1)));
      col.push_back(e(id(i, k), id(i + 1, k)));
    }
    cyc.push_back(row);
    cyc.push_back(col);
  }
  return gf2_rank(g.edge_count(), cyc);
}

Outcome c9() {
  const auto r = run_lab("geometry", default_manifest("geometry"));
  const bool a = all_pass(rows(r, "ball_removal"));
  const bool b = all_pass(rows(r, "exposed_sphere_minimal_cutset"));
  const auto c12 = delta_bracket(generate("cycle:12"));
  const auto t4g = generate("torus:4x4");
  const auto t4 = delta_bracket(t4g);
  const std::size_t full = t4g.edge_count() - t4g.vertex_count() + 1;
  // no triangles, so delta >= 2; the short cycles span, so delta <= 2
  const bool oracle2 = torus4_short_cycle_rank(t4g) == full;
  const bool c = c12.determined && c12.delta_lower == 6 && c12.delta_upper == 6 && t4.determined &&
                 t4.delta_lower <= 2 && 2 <= t4.delta_upper && t4.rank_full == full && oracle2;
  std::size_t instances = 0;
  bool d = true;
  for (auto* row : rows(r, "cutset_r_connected")) {
    d &= row->verdict == Verdict::kPass;
    instances += row->inputs.at("instances").get<std::size_t>();
  }
  return {a && b && c && d, std::string("(a) ") + (a ? "ok" : "fail") + " (b) " + (b ? "ok" : "fail") +
                                " (c) cycle:12 [" + std::to_string(c12.delta_lower) + "," +
                                std::to_string(c12.delta_upper) + "], torus:4x4 [" + std::to_string(t4.delta_lower) +
                                "," + std::to_string(t4.delta_upper) + "] rank " + std::to_string(t4.rank_full) +
                                "/" + std::to_string(full) + (oracle2 ? " oracle ok" : " oracle fail") + " (d) " +
                                std::to_string(instances) + " instances " + (d ? "ok" : "fail")};
}

Outcome c10() {
  const double up200 = gh_circle_upper(generate("cycle:200")).value;
  const auto t16 = generate("torus:16x16");
  const double low16 = gh_circle_lower(t16).value;
  // explicit packing: 6 points at pairwise distance >= 8 = D/2
  const int pts[6][2] = {{0, 0}, {8, 0}, {0, 8}, {8, 8}, {4, 4}, {12, 4}};
  bool packed = true;
  for (int i = 0; i < 6; ++i) {
    const auto d = bfs_distances(t16, static_cast<VertexId>(pts[i][0] * 16 + pts[i][1]));
    for (int j = i + 1; j < 6; ++j) packed &= d[static_cast<VertexId>(pts[j][0] * 16 + pts[j][1])] >= 8;
  }
  const double oracle = (std::numbers::pi / 2 - 2 * std::numbers::pi / 6) / 2;
  std::size_t bad = 0;
  for (const auto& spec : default_geometry_suite()) {
    const auto g = generate(spec);
    bad += gh_circle_lower(g).value > gh_circle_upper(g).value;
  }
  const bool ok = up200 <= 0.04 && low16 >= 0.2 && packed && oracle >= 0.2 && low16 >= oracle - 1e-12 && bad == 0;
  return {ok, "upper(cycle:200) " + fmt("%.4f", up200) + ", lower(torus:16x16) " + fmt("%.4f", low16) +
                  " (packing oracle " + fmt("%.4f", oracle) + (packed ? ", separated" : ", NOT separated") + "), " +
                  std::to_string(bad) + " sandwich violations"};
}

Outcome c11() {
  const auto r = run_lab("gradual-emergence", default_manifest("gradual-emergence"));
  const auto ceil = rows(r, "median_jump_ceiling");
  const auto floor = rows(r, "median_jump_floor");
  const auto exact = rows(r, "full_sweep_exact");
  const bool ok = all_pass(ceil) && all_pass(floor) && all_pass(exact);
  std::size_t mism = 0;
  for (auto* e : exact) mism += static_cast<std::size_t>(e->lhs);
  return {ok, "median J(0.05) torus:64x64 " + fmt("%.4f", ceil.at(0)->lhs) + " (<= 0.35), torus:4x4096 " +
                  fmt("%.4f", floor.at(0)->lhs) + " (>= 0.5); J(1) mismatches " + std::to_string(mism)};
}

Outcome c12() {
  std::vector<std::string> diffs;
  auto cmp = [&](const std::string& name, const std::string& a, const std::string& b) {
    if (a != b) diffs.push_back(name);
  };
  {
    const auto g = generate("cycle:100");
    cmp("two_point", to_json(two_point(g, 0.8, 0, 10, mc(10000, 1))).dump(),
        to_json(two_point(g, 0.8, 0, 10, mc(10000, 4))).dump());
    const auto c4 = generate("cycle:4");
    cmp("giant", to_json(giant_prob(c4, 0.5, 0.5, mc(10000, 1))).dump(),
        to_json(giant_prob(c4, 0.5, 0.5, mc(10000, 4))).dump());
  }
  {
    SolveOptions opts;
    opts.tol = 0.01;
    opts.max_trials = 65536;
    cmp("qG", to_json(qG("torus:64x64")).dump(), to_json(solve_qG(generate("torus:64x64"), opts, mc(400, 4))).dump());
  }
  for (const auto& lab : lab_names()) {
    auto m = default_manifest(lab);
    m.workers = 1;
    const auto a = stable_dump(run_lab(lab, m));
    m.workers = 4;
    cmp(lab, a, stable_dump(run_lab(lab, m)));
  }
  std::string d = "two_point, giant, qG(64^2) and all six labs at workers 1 vs 4";
  for (const auto& x : diffs) d += "; differs: " + x;
  return {diffs.empty(), d};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{{1, 10, c1},    {2, 30, c2},   {3, 600, c3},  {4, 600, c4},
                                   {5, 900, c5},   {6, 300, c6},  {7, 300, c7},  {8, 600, c8},
                                   {9, 300, c9},   {10, 120, c10}, {11, 600, c11}, {12, 1e9, c12}};
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = s < c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s criterion %d: %s [%.1fs%s]\n", pass ? "PASS" : "FAIL", c.id, o.detail.c_str(), s,
                in_time ? "" : ", over time limit");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, all.size());
  return failed ? 1 : 0;
}
