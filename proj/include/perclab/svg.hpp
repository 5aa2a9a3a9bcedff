#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace perclab {

struct PlotCurve {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotCurve> curves;
};

/// Standalone SVG line chart with axes, ticks and a legend.
std::string render_line_chart(const PlotSpec& plot);

/// Reads a series CSV (series,curve,x,y) and writes one chart per series:
/// the first to `<stem>.svg`, the others to `<stem>_<series>.svg`. Labels
/// come from `axis_labels` entries "series,x label,y label" when present.
/// Returns the written paths.
std::vector<std::filesystem::path> plots_from_series_csv(const std::filesystem::path& csv,
                                                         const std::filesystem::path& out_dir,
                                                         const std::string& stem,
                                                         const std::vector<std::vector<std::string>>& axis_labels = {});

}  // namespace perclab
