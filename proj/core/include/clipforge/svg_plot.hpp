#ifndef CLIPFORGE_SVG_PLOT_HPP
#define CLIPFORGE_SVG_PLOT_HPP

#include <string>
#include <vector>

namespace clipforge {

// Deterministic SVG line/scatter rendering: fixed canvas, series sorted by
// label, fixed number formatting. The same input always produces the same
// bytes, so plots can be golden-tested.
struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool scatter_only = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<PlotSeries> series;
};

std::string render_svg(const PlotSpec& spec);

}  // namespace clipforge

#endif  // CLIPFORGE_SVG_PLOT_HPP
