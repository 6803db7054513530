#pragma once

#include <string>
#include <vector>

namespace rndiff::cli {

struct SvgSeries {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
  bool line = true;      // polyline through the points
  bool markers = false;  // a circle per point
};

struct SvgReference {
  std::string label;
  double y = 0.0;
};

struct SvgPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
  std::vector<SvgReference> references;  // dashed horizontal lines
  int width = 720;
  int height = 440;
};

// Non-finite points are skipped. Output is deterministic for equal input.
std::string render_svg(const SvgPlot& plot);

}  // namespace rndiff::cli
