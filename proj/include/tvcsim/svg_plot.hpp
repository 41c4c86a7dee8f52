#pragma once

#include <string>
#include <utility>
#include <vector>

namespace tvcsim {

struct PlotSeries {
  std::string label;
  std::string color; // empty: assigned from the default palette
  std::vector<std::pair<double, double>> pts;
};

struct PlotPanel {
  std::string title;
  std::string y_label;
  std::vector<PlotSeries> series;
};

// Self-contained SVG document with stacked panels sharing an x axis.
std::string render_plot_svg(const std::string& title, const std::string& x_label,
                            const std::vector<PlotPanel>& panels, int width = 960,
                            int panel_height = 230);

} // namespace tvcsim
