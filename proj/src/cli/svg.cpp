#include "rndiff/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "rndiff/format.hpp"

namespace rndiff::cli {

namespace {

constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;  // room for the legend
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Round step of roughly span / 5 from {1, 2, 5} x 10^k.
double tick_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      const double pad = std::max(1e-6, 0.05 * std::abs(hi));
      lo -= pad;
      hi += pad;
    }
  }
};

}  // namespace

std::string render_svg(const SvgPlot& plot) {
  Range xr;
  Range yr;
  for (const SvgSeries& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
        xr.include(s.x[i]);
        yr.include(s.y[i]);
      }
    }
  }
  for (const SvgReference& r : plot.references) yr.include(r.y);
  xr.settle();
  yr.settle();
  const double ypad = 0.05 * (yr.hi - yr.lo);
  yr.lo -= ypad;
  yr.hi += ypad;

  const double w = plot.width;
  const double h = plot.height;
  const double pw = w - kLeft - kRight;
  const double ph = h - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(plot.width) + "\" height=\"" +
         std::to_string(plot.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + coord(kLeft + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         escape(plot.title) + "</text>\n";

  // Axes box and ticks.
  out += "<rect x=\"" + coord(kLeft) + "\" y=\"" + coord(kTop) + "\" width=\"" + coord(pw) + "\" height=\"" +
         coord(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  const double xs = tick_step(xr.hi - xr.lo);
  for (double v = std::ceil(xr.lo / xs) * xs; v <= xr.hi + 1e-9 * xs; v += xs) {
    const double x = px(v);
    out += "<line x1=\"" + coord(x) + "\" y1=\"" + coord(kTop + ph) + "\" x2=\"" + coord(x) + "\" y2=\"" +
           coord(kTop + ph + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + coord(x) + "\" y=\"" + coord(kTop + ph + 18) + "\" text-anchor=\"middle\">" +
           format_sig6(std::abs(v) < 1e-12 * xs ? 0.0 : v) + "</text>\n";
  }
  const double ys = tick_step(yr.hi - yr.lo);
  for (double v = std::ceil(yr.lo / ys) * ys; v <= yr.hi + 1e-9 * ys; v += ys) {
    const double y = py(v);
    out += "<line x1=\"" + coord(kLeft - 5) + "\" y1=\"" + coord(y) + "\" x2=\"" + coord(kLeft) + "\" y2=\"" +
           coord(y) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + coord(kLeft) + "\" y1=\"" + coord(y) + "\" x2=\"" + coord(kLeft + pw) + "\" y2=\"" +
           coord(y) + "\" stroke=\"#e0e0e0\"/>\n";
    out += "<text x=\"" + coord(kLeft - 8) + "\" y=\"" + coord(y + 4) + "\" text-anchor=\"end\">" +
           format_sig6(std::abs(v) < 1e-12 * ys ? 0.0 : v) + "</text>\n";
  }
  out += "<text x=\"" + coord(kLeft + pw / 2) + "\" y=\"" + coord(h - 15) + "\" text-anchor=\"middle\">" +
         escape(plot.x_label) + "</text>\n";
  out += "<text transform=\"translate(18," + coord(kTop + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         escape(plot.y_label) + "</text>\n";

  double legend_y = kTop + 10;
  auto legend = [&](const std::string& label, const std::string& swatch) {
    out += swatch;
    out += "<text x=\"" + coord(kLeft + pw + 38) + "\" y=\"" + coord(legend_y + 4) + "\">" + escape(label) +
           "</text>\n";
    legend_y += 20;
  };

  for (const SvgReference& r : plot.references) {
    const double y = py(r.y);
    out += "<line x1=\"" + coord(kLeft) + "\" y1=\"" + coord(y) + "\" x2=\"" + coord(kLeft + pw) + "\" y2=\"" +
           coord(y) + "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
    legend(r.label, "<line x1=\"" + coord(kLeft + pw + 10) + "\" y1=\"" + coord(legend_y) + "\" x2=\"" +
                        coord(kLeft + pw + 32) + "\" y2=\"" + coord(legend_y) +
                        "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n");
  }

  for (const SvgSeries& s : plot.series) {
    std::string points;
    std::string marks;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      const std::string cx = coord(px(s.x[i]));
      const std::string cy = coord(py(s.y[i]));
      if (!points.empty()) points += ' ';
      points += cx + "," + cy;
      if (s.markers) {
        marks += "<circle cx=\"" + cx + "\" cy=\"" + cy + "\" r=\"4\" fill=\"" + s.color + "\"/>\n";
      }
    }
    if (s.line && !points.empty()) {
      out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    }
    out += marks;
    std::string swatch;
    if (s.line) {
      swatch += "<line x1=\"" + coord(kLeft + pw + 10) + "\" y1=\"" + coord(legend_y) + "\" x2=\"" +
                coord(kLeft + pw + 32) + "\" y2=\"" + coord(legend_y) + "\" stroke=\"" + s.color +
                "\" stroke-width=\"1.5\"/>\n";
    }
    if (s.markers) {
      swatch += "<circle cx=\"" + coord(kLeft + pw + 21) + "\" cy=\"" + coord(legend_y) + "\" r=\"4\" fill=\"" +
                s.color + "\"/>\n";
    }
    legend(s.label, swatch);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace rndiff::cli
