#include "perclab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "perclab/report_io.hpp"

namespace perclab {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 190, kTop = 40, kBottom = 60;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#7f7f7f", "#17becf", "#bcbd22"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// 1-2-5 ticks covering [lo, hi]
std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double f : {1.0, 2.0, 5.0, 10.0})
    if (f * mag >= raw) {
      step = f * mag;
      break;
    }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step)
    out.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
  return out;
}

}  // namespace

std::string render_line_chart(const PlotSpec& plot) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& c : plot.curves)
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      if (!std::isfinite(c.x[i]) || !std::isfinite(c.y[i])) continue;
      xmin = std::min(xmin, c.x[i]);
      xmax = std::max(xmax, c.x[i]);
      ymin = std::min(ymin, c.y[i]);
      ymax = std::max(ymax, c.y[i]);
    }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax - xmin < 1e-12) xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return kTop + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(plot.title) << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(xmin, xmax)) {
    os << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << kTop + ph << "\" x2=\"" << num(sx(t)) << "\" y2=\""
       << kTop + ph + 5 << "\" stroke=\"black\"/>";
    os << "<text x=\"" << num(sx(t)) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << num(t)
       << "</text>\n";
  }
  for (double t : ticks(ymin, ymax)) {
    os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << num(sy(t)) << "\" x2=\"" << kLeft << "\" y2=\"" << num(sy(t))
       << "\" stroke=\"black\"/>";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(sy(t) + 4) << "\" text-anchor=\"end\">" << num(t)
       << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
     << escape(plot.x_label) << "</text>\n";
  os << "<text transform=\"translate(18," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(plot.y_label) << "</text>\n";

  for (std::size_t ci = 0; ci < plot.curves.size(); ++ci) {
    const auto& c = plot.curves[ci];
    const char* color = kPalette[ci % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < c.x.size(); ++i)
      if (std::isfinite(c.x[i]) && std::isfinite(c.y[i])) os << num(sx(c.x[i])) << ',' << num(sy(c.y[i])) << ' ';
    os << "\"/>\n";
    for (std::size_t i = 0; i < c.x.size(); ++i)
      if (std::isfinite(c.x[i]) && std::isfinite(c.y[i]))
        os << "<circle cx=\"" << num(sx(c.x[i])) << "\" cy=\"" << num(sy(c.y[i])) << "\" r=\"2\" fill=\"" << color
           << "\"/>";
    os << '\n';
    const double ly = kTop + 10 + 18 * static_cast<double>(ci);
    os << "<line x1=\"" << kWidth - kRight + 12 << "\" y1=\"" << ly << "\" x2=\"" << kWidth - kRight + 32
       << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
    os << "<text x=\"" << kWidth - kRight + 38 << "\" y=\"" << ly + 4 << "\">" << escape(c.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<std::filesystem::path> plots_from_series_csv(const std::filesystem::path& csv,
                                                         const std::filesystem::path& out_dir,
                                                         const std::string& stem,
                                                         const std::vector<std::vector<std::string>>& axis_labels) {
  std::ifstream in(csv);
  if (!in) throw std::runtime_error("cannot read " + csv.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<PlotSpec> plots;
  std::map<std::string, std::size_t> plot_index;
  std::vector<std::map<std::string, std::size_t>> curve_index;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = parse_csv_line(line);
    if (f.size() != 4) throw std::runtime_error("malformed series row: " + line);
    auto [it, fresh] = plot_index.emplace(f[0], plots.size());
    if (fresh) {
      PlotSpec p;
      p.title = f[0];
      for (const auto& a : axis_labels)
        if (a.size() == 3 && a[0] == f[0]) p.x_label = a[1], p.y_label = a[2];
      plots.push_back(std::move(p));
      curve_index.emplace_back();
    }
    auto& plot = plots[it->second];
    auto [cit, cfresh] = curve_index[it->second].emplace(f[1], plot.curves.size());
    if (cfresh) plot.curves.push_back({f[1], {}, {}});
    plot.curves[cit->second].x.push_back(std::stod(f[2]));
    plot.curves[cit->second].y.push_back(std::stod(f[3]));
  }
  std::vector<std::filesystem::path> written;
  for (std::size_t i = 0; i < plots.size(); ++i) {
    auto path = out_dir / (i == 0 ? stem + ".svg" : stem + "_" + plots[i].title + ".svg");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << render_line_chart(plots[i]);
    written.push_back(std::move(path));
  }
  return written;
}

}  // namespace perclab
