#include "airfoil/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace airfoil {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string svg_open(double width, double height) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" "
                "height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                width, height, width, height);
  return buf;
}

// Maps data coordinates into a pixel box, y inverted.
struct Frame {
  double x0, x1, y0, y1;          // data range
  double px, py, pw, ph;          // pixel box
  double x(double v) const { return px + (v - x0) / (x1 - x0) * pw; }
  double y(double v) const { return py + ph - (v - y0) / (y1 - y0) * ph; }
};

std::string closed_path(const AirfoilCoordinates& coords, const Frame& f,
                        const char* color) {
  std::string d;
  for (std::size_t i = 0; i < coords.points.size(); ++i) {
    d += (i == 0) ? "M" : "L";
    d += fmt(f.x(coords.points[i][0])) + " " + fmt(f.y(coords.points[i][1])) + " ";
  }
  d += "Z";
  return "<path class=\"airfoil\" fill=\"none\" stroke=\"" + std::string(color) +
         "\" stroke-width=\"1.2\" d=\"" + d + "\"/>\n";
}

std::string text_at(double x, double y, const std::string& s, const char* color,
                    int size = 11) {
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"%d\" "
                "font-family=\"sans-serif\" fill=\"%s\">",
                x, y, size, color);
  return std::string(buf) + s + "</text>\n";
}

std::pair<double, double> y_extent(const AirfoilCoordinates& coords) {
  double lo = 0.0, hi = 0.0;
  for (const auto& p : coords.points) {
    lo = std::min(lo, p[1]);
    hi = std::max(hi, p[1]);
  }
  return {lo, hi};
}

std::string feature_label(const AeroFeatures& f) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "CL=%.3f CD=%.4f CM=%.3f", f.cl, f.cd, f.cm);
  return buf;
}

}  // namespace

std::string render_airfoils_svg(const std::vector<AirfoilPlotEntry>& entries) {
  if (entries.empty()) throw std::invalid_argument("render_airfoils_svg: empty selection");
  const double width = 720, height = 360;
  double ylo = -0.25, yhi = 0.25;
  for (const auto& e : entries) {
    const auto [lo, hi] = y_extent(e.coords);
    ylo = std::min(ylo, lo - 0.05);
    yhi = std::max(yhi, hi + 0.05);
  }
  Frame frame{-0.05, 1.05, ylo, yhi, 40, 20, width - 60, height - 60};

  std::string out = svg_open(width, height);
  out += "<line x1=\"" + fmt(frame.x(0)) + "\" y1=\"" + fmt(frame.y(0)) +
         "\" x2=\"" + fmt(frame.x(1)) + "\" y2=\"" + fmt(frame.y(0)) +
         "\" stroke=\"#cccccc\" stroke-dasharray=\"4 3\"/>\n";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    out += closed_path(entries[i].coords, frame, color);
    std::string label = entries[i].label;
    if (entries[i].features) label += "  " + feature_label(*entries[i].features);
    out += text_at(45, 32 + 14 * static_cast<double>(i), label, color);
  }
  out += "</svg>\n";
  return out;
}

std::string render_feature_scatter_svg(const std::vector<AeroFeatures>& features) {
  if (features.empty()) throw std::invalid_argument("render_feature_scatter_svg: no rows");
  struct Panel {
    const char* x_name;
    const char* y_name;
    double (*x_of)(const AeroFeatures&);
    double (*y_of)(const AeroFeatures&);
  };
  const Panel panels[3] = {
      {"CL", "CD", [](const AeroFeatures& f) { return f.cl; },
       [](const AeroFeatures& f) { return f.cd; }},
      {"CL", "CM", [](const AeroFeatures& f) { return f.cl; },
       [](const AeroFeatures& f) { return f.cm; }},
      {"CD", "CM", [](const AeroFeatures& f) { return f.cd; },
       [](const AeroFeatures& f) { return f.cm; }},
  };

  const double panel_w = 270, panel_h = 260, width = 3 * panel_w, height = panel_h + 20;
  std::string out = svg_open(width, height);
  for (int p = 0; p < 3; ++p) {
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (const auto& f : features) {
      xlo = std::min(xlo, panels[p].x_of(f));
      xhi = std::max(xhi, panels[p].x_of(f));
      ylo = std::min(ylo, panels[p].y_of(f));
      yhi = std::max(yhi, panels[p].y_of(f));
    }
    const double xpad = (xhi - xlo) * 0.05 + 1e-12;
    const double ypad = (yhi - ylo) * 0.05 + 1e-12;
    Frame frame{xlo - xpad, xhi + xpad, ylo - ypad, yhi + ypad,
                p * panel_w + 45.0, 25.0, panel_w - 65.0, panel_h - 55.0};
    char box[256];
    std::snprintf(box, sizeof(box),
                  "<g class=\"panel\"><rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" "
                  "height=\"%.1f\" fill=\"none\" stroke=\"#444444\"/>\n",
                  frame.px, frame.py, frame.pw, frame.ph);
    out += box;
    for (const auto& f : features) {
      std::snprintf(box, sizeof(box),
                    "<circle class=\"pt\" cx=\"%.2f\" cy=\"%.2f\" r=\"1.8\" "
                    "fill=\"#1f77b4\" fill-opacity=\"0.6\"/>\n",
                    frame.x(panels[p].x_of(f)), frame.y(panels[p].y_of(f)));
      out += box;
    }
    out += text_at(frame.px + frame.pw / 2 - 10, frame.py + frame.ph + 18,
                   panels[p].x_name, "#000000");
    out += text_at(frame.px - 35, frame.py + frame.ph / 2, panels[p].y_name, "#000000");
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string render_process_svg(const std::vector<ProcessPanel>& panels) {
  if (panels.empty()) throw std::invalid_argument("render_process_svg: no panels");
  const double panel_w = 250, panel_h = 170;
  const double width = panel_w * static_cast<double>(panels.size());
  const double height = panel_h;
  std::string out = svg_open(width, height);
  for (std::size_t i = 0; i < panels.size(); ++i) {
    auto [ylo, yhi] = y_extent(panels[i].coords);
    ylo = std::min(ylo, -0.3) - 0.05;
    yhi = std::max(yhi, 0.3) + 0.05;
    Frame frame{-0.05, 1.05, ylo, yhi, i * panel_w + 15.0, 25.0, panel_w - 30.0,
                panel_h - 45.0};
    out += "<g class=\"panel\">\n";
    out += closed_path(panels[i].coords, frame, kPalette[0]);
    out += text_at(i * panel_w + 20.0, 16, panels[i].label, "#000000");
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace airfoil
