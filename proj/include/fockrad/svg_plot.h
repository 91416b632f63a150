#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fockrad {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
  bool markers = false;  // points instead of a line
};

struct PlotAxes {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

// Minimal static SVG line/scatter chart. Non-finite points (and nonpositive
// ones on log axes) are skipped.
void write_svg_plot(std::ostream& out, const PlotAxes& axes, std::span<const PlotSeries> series);

}  // namespace fockrad
