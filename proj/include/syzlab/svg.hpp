#pragma once

#include <string>
#include <vector>

namespace syzlab {

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

struct PlotSpec {
  std::string title, x_label, y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 640;
  int height = 420;
};

/// Standalone SVG line plot. Points that are not finite, or not positive on a
/// log axis, are skipped. Output depends only on the arguments.
std::string line_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace syzlab
