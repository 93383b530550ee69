#include "clipforge/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace clipforge {

namespace {

constexpr int kWidth = 800, kHeight = 600;
constexpr int kMarginLeft = 70, kMarginRight = 160, kMarginTop = 40, kMarginBottom = 50;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string fmt_coord(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
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

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  if (spec.series.empty()) throw std::invalid_argument("render_svg: no series");

  std::vector<PlotSeries> series = spec.series;
  std::sort(series.begin(), series.end(),
            [](const PlotSeries& a, const PlotSeries& b) { return a.label < b.label; });

  double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
  for (auto& s : series) {
    std::sort(s.points.begin(), s.points.end());
    for (auto& [x, y] : s.points) {
      const double px = spec.log_x ? std::log10(x) : x;
      x_min = std::min(x_min, px);
      x_max = std::max(x_max, px);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (!(x_min <= x_max)) throw std::invalid_argument("render_svg: series have no points");
  if (x_max == x_min) {
    x_min -= 1;
    x_max += 1;
  }
  if (y_max == y_min) {
    y_min -= 1;
    y_max += 1;
  }
  const double x_pad = 0.03 * (x_max - x_min), y_pad = 0.05 * (y_max - y_min);
  x_min -= x_pad;
  x_max += x_pad;
  y_min -= y_pad;
  y_max += y_pad;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto sx = [&](double x) {
    const double px = spec.log_x ? std::log10(x) : x;
    return kMarginLeft + (px - x_min) / (x_max - x_min) * plot_w;
  };
  auto sy = [&](double y) { return kMarginTop + (y_max - y) / (y_max - y_min) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\""
      << " font-family=\"sans-serif\">" << escape_xml(spec.title) << "</text>\n";

  // Frame + 5 ticks per axis.
  svg << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = x_min + (x_max - x_min) * i / 5.0;
    const double gx = kMarginLeft + plot_w * i / 5.0;
    const double label = spec.log_x ? std::pow(10.0, fx) : fx;
    svg << "<line x1=\"" << fmt_coord(gx) << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\""
        << fmt_coord(gx) << "\" y2=\"" << kMarginTop + plot_h + 5 << "\" stroke=\"#444\"/>\n";
    svg << "<text x=\"" << fmt_coord(gx) << "\" y=\"" << kMarginTop + plot_h + 20
        << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(label)
        << "</text>\n";
    const double fy = y_min + (y_max - y_min) * i / 5.0;
    const double gy = kMarginTop + plot_h - plot_h * i / 5.0;
    svg << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << fmt_coord(gy) << "\" x2=\""
        << kMarginLeft << "\" y2=\"" << fmt_coord(gy) << "\" stroke=\"#444\"/>\n";
    svg << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << fmt_coord(gy + 4)
        << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(fy)
        << "</text>\n";
  }
  svg << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">"
      << escape_xml(spec.x_label) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << kMarginTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\""
      << " transform=\"rotate(-90 18 " << kMarginTop + plot_h / 2 << ")\">"
      << escape_xml(spec.y_label) << "</text>\n";

  for (size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    if (!s.scatter_only && s.points.size() > 1) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : s.points) svg << fmt_coord(sx(x)) << "," << fmt_coord(sy(y)) << " ";
      svg << "\"/>\n";
    }
    for (const auto& [x, y] : s.points)
      svg << "<circle cx=\"" << fmt_coord(sx(x)) << "\" cy=\"" << fmt_coord(sy(y))
          << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    const double ly = kMarginTop + 16.0 * static_cast<double>(si);
    svg << "<rect x=\"" << kWidth - kMarginRight + 10 << "\" y=\"" << fmt_coord(ly)
        << "\" width=\"12\" height=\"4\" fill=\"" << color << "\"/>\n";
    svg << "<text x=\"" << kWidth - kMarginRight + 28 << "\" y=\"" << fmt_coord(ly + 6)
        << "\" font-size=\"11\" font-family=\"sans-serif\">" << escape_xml(s.label)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace clipforge
