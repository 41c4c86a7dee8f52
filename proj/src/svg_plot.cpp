#include "tvcsim/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace tvcsim {

namespace {

constexpr const char* kPalette[] = {"#3465a4", "#cc0000", "#4e9a06",
                                    "#f57900", "#75507b", "#0e7c7b"};
constexpr std::size_t kMaxPointsPerSeries = 1200;

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void include(double v) {
    if (!std::isfinite(v))
      return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finalize() {
    if (lo > hi) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      const double pad = std::max(1.0, std::abs(lo));
      lo -= pad;
      hi += pad;
    } else {
      const double pad = 0.04 * (hi - lo);
      lo -= pad;
      hi += pad;
    }
  }
};

// Round tick spacing to 1/2/5 times a power of ten.
std::vector<double> nice_ticks(double lo, double hi, int target) {
  const double raw = (hi - lo) / std::max(1, target);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = 10.0 * mag;
  for (double m : {1.0, 2.0, 5.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> ticks;
  for (double v = std::ceil(lo / step) * step; v <= hi + 0.5 * step; v += step)
    ticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return ticks;
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    default: out += c;
    }
  }
  return out;
}

} // namespace

std::string render_plot_svg(const std::string& title, const std::string& x_label,
                            const std::vector<PlotPanel>& panels, int width,
                            int panel_height) {
  const int ml = 70, mr = 20, mt = 40, mb = 42, gap = 26;
  const int plot_w = width - ml - mr;
  const int n_panels = static_cast<int>(panels.size());
  const int height = mt + n_panels * panel_height + (n_panels - 1) * gap + mb;

  Range xr;
  for (const PlotPanel& p : panels)
    for (const PlotSeries& s : p.series)
      for (const auto& [x, y] : s.pts)
        xr.include(x);
  xr.finalize();

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
     << "<style>text{font-family:sans-serif;fill:#222}.t{font-size:14px;font-weight:bold}"
        ".a{font-size:11px}.l{font-size:11px}</style>\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text class=\"t\" x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\">"
     << escape_xml(title) << "</text>\n";

  auto x_to_px = [&](double x) {
    return ml + plot_w * (x - xr.lo) / (xr.hi - xr.lo);
  };

  for (int pi = 0; pi < n_panels; ++pi) {
    const PlotPanel& panel = panels[pi];
    const int top = mt + pi * (panel_height + gap);
    const int bot = top + panel_height;

    Range yr;
    for (const PlotSeries& s : panel.series)
      for (const auto& [x, y] : s.pts)
        yr.include(y);
    yr.finalize();
    auto y_to_px = [&](double y) {
      return bot - (panel_height) * (y - yr.lo) / (yr.hi - yr.lo);
    };

    os << "<rect x=\"" << ml << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
       << panel_height << "\" fill=\"#fcfcfc\" stroke=\"#888\"/>\n";

    for (double ty : nice_ticks(yr.lo, yr.hi, 5)) {
      const double py = y_to_px(ty);
      os << "<line x1=\"" << ml << "\" y1=\"" << fmt2(py) << "\" x2=\"" << ml + plot_w
         << "\" y2=\"" << fmt2(py) << "\" stroke=\"#ddd\"/>\n"
         << "<text class=\"a\" x=\"" << ml - 6 << "\" y=\"" << fmt2(py + 3.5)
         << "\" text-anchor=\"end\">" << fmt_tick(ty) << "</text>\n";
    }
    for (double tx : nice_ticks(xr.lo, xr.hi, 8)) {
      const double px = x_to_px(tx);
      os << "<line x1=\"" << fmt2(px) << "\" y1=\"" << top << "\" x2=\"" << fmt2(px)
         << "\" y2=\"" << bot << "\" stroke=\"#eee\"/>\n";
      if (pi == n_panels - 1)
        os << "<text class=\"a\" x=\"" << fmt2(px) << "\" y=\"" << bot + 16
           << "\" text-anchor=\"middle\">" << fmt_tick(tx) << "</text>\n";
    }

    std::size_t color_i = 0;
    for (const PlotSeries& s : panel.series) {
      const std::string color =
          s.color.empty() ? kPalette[color_i % std::size(kPalette)] : s.color;
      ++color_i;
      if (s.pts.empty())
        continue;
      const std::size_t stride =
          std::max<std::size_t>(1, (s.pts.size() + kMaxPointsPerSeries - 1) /
                                       kMaxPointsPerSeries);
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.3\" points=\"";
      for (std::size_t i = 0; i < s.pts.size(); i += stride) {
        const auto& [x, y] = s.pts[i];
        if (!std::isfinite(x) || !std::isfinite(y))
          continue;
        os << fmt2(x_to_px(x)) << "," << fmt2(y_to_px(y)) << " ";
      }
      const auto& [xl, yl] = s.pts.back();
      if (std::isfinite(xl) && std::isfinite(yl))
        os << fmt2(x_to_px(xl)) << "," << fmt2(y_to_px(yl));
      os << "\"/>\n";
    }

    // Legend: top-right corner of the panel.
    int ly = top + 14;
    color_i = 0;
    for (const PlotSeries& s : panel.series) {
      const std::string color =
          s.color.empty() ? kPalette[color_i % std::size(kPalette)] : s.color;
      ++color_i;
      if (s.label.empty())
        continue;
      const int lx = ml + plot_w - 150;
      os << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 22 << "\" y2=\""
         << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
         << "<text class=\"l\" x=\"" << lx + 27 << "\" y=\"" << ly << "\">"
         << escape_xml(s.label) << "</text>\n";
      ly += 15;
    }

    os << "<text class=\"a\" x=\"16\" y=\"" << top + panel_height / 2
       << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << top + panel_height / 2
       << ")\">" << escape_xml(panel.y_label) << "</text>\n";
    if (!panel.title.empty())
      os << "<text class=\"l\" x=\"" << ml + 6 << "\" y=\"" << top + 14 << "\">"
         << escape_xml(panel.title) << "</text>\n";
  }

  os << "<text class=\"a\" x=\"" << ml + plot_w / 2 << "\" y=\"" << height - 10
     << "\" text-anchor=\"middle\">" << escape_xml(x_label) << "</text>\n</svg>\n";
  return os.str();
}

} // namespace tvcsim
