#pragma once

// Small SVG plot writer for quick looks at the CSV outputs.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fracoam/field.hpp"

namespace fracoam::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
};

struct Axes {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
};

namespace detail {

inline constexpr int kWidth = 720;
inline constexpr int kHeight = 480;
inline constexpr int kLeft = 80;
inline constexpr int kRight = 170;
inline constexpr int kTop = 40;
inline constexpr int kBottom = 60;

inline constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                         "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"};

inline std::string escape(const std::string& s) {
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

inline void header(std::ostream& os, int w, int h) {
  fmt::print(os, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
                 "font-family=\"sans-serif\" font-size=\"12\">\n", w, h);
  fmt::print(os, "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", w, h);
}

struct Frame {
  double x0, x1, y0, y1;
  bool log_y;
  [[nodiscard]] double px(double x) const {
    const double plot = kWidth - kLeft - kRight;
    return kLeft + (x1 > x0 ? (x - x0) / (x1 - x0) : 0.5) * plot;
  }
  [[nodiscard]] double py(double y) const {
    const double plot = kHeight - kTop - kBottom;
    const double v = log_y ? std::log10(std::max(y, 1e-300)) : y;
    return kTop + (1.0 - (y1 > y0 ? (v - y0) / (y1 - y0) : 0.5)) * plot;
  }
};

inline void frame(std::ostream& os, const Frame& f, const Axes& ax) {
  const int pw = kWidth - kLeft - kRight;
  const int ph = kHeight - kTop - kBottom;
  fmt::print(os, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft, kTop,
             pw, ph);
  for (int k = 0; k <= 4; ++k) {
    const double xv = f.x0 + (f.x1 - f.x0) * k / 4.0;
    const double xp = kLeft + pw * k / 4.0;
    fmt::print(os, "<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{:.4g}</text>\n", xp, kTop + ph + 18, xv);
    const double yv = f.y0 + (f.y1 - f.y0) * k / 4.0;
    const double yp = kTop + ph * (1.0 - k / 4.0);
    fmt::print(os, "<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{:.4g}</text>\n", kLeft - 6, yp + 4,
               f.log_y ? std::pow(10.0, yv) : yv);
  }
  fmt::print(os, "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n", kLeft + pw / 2,
             escape(ax.title));
  fmt::print(os, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", kLeft + pw / 2, kHeight - 16,
             escape(ax.x_label));
  fmt::print(os, "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
             kTop + ph / 2, kTop + ph / 2, escape(ax.y_label));
}

}  // namespace detail

inline void line_plot(std::ostream& os, const std::vector<Series>& series, const Axes& ax) {
  using namespace detail;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      const double v = ax.log_y ? std::log10(std::max(s.y[k], 1e-300)) : s.y[k];
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!ax.log_y) y0 = std::min(y0, 0.0);
  if (y1 - y0 < 1e-12) y1 = y0 + 1.0;
  const Frame f{x0, x1, y0, y1 + 0.05 * (y1 - y0), ax.log_y};

  header(os, kWidth, kHeight);
  frame(os, f, ax);
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % kPalette.size()];
    if (s.markers) {
      for (std::size_t k = 0; k < s.x.size(); ++k)
        fmt::print(os, "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n", f.px(s.x[k]), f.py(s.y[k]),
                   color);
    } else {
      os << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << color << "\" points=\"";
      for (std::size_t k = 0; k < s.x.size(); ++k) fmt::print(os, "{:.2f},{:.2f} ", f.px(s.x[k]), f.py(s.y[k]));
      os << "\"/>\n";
    }
    const int ly = kTop + 14 + 18 * static_cast<int>(si);
    const int lx = kWidth - kRight + 12;
    fmt::print(os, "<rect x=\"{}\" y=\"{}\" width=\"14\" height=\"4\" fill=\"{}\"/>\n", lx, ly - 6, color);
    fmt::print(os, "<text x=\"{}\" y=\"{}\">{}</text>\n", lx + 20, ly, escape(s.label));
  }
  os << "</svg>\n";
}

inline void bar_chart(std::ostream& os, const std::vector<std::string>& labels, const std::vector<double>& values,
                      const Axes& ax) {
  using namespace detail;
  const double vmax = values.empty() ? 1.0 : std::max(*std::max_element(values.begin(), values.end()), 1e-300);
  const Frame f{0.0, static_cast<double>(std::max<std::size_t>(values.size(), 1)), 0.0, vmax * 1.05, false};
  header(os, kWidth, kHeight);
  frame(os, f, ax);
  const double bw = (f.px(1.0) - f.px(0.0)) * 0.8;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double x = f.px(static_cast<double>(k)) + 0.1 * (f.px(1.0) - f.px(0.0));
    const double y = f.py(values[k]);
    fmt::print(os, "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"><title>{}: {:.4g}</title></rect>\n",
               x, y, bw, f.py(0.0) - y, kPalette[0], escape(labels[k]), values[k]);
  }
  os << "</svg>\n";
}

/// Intensity |f|^2 on its polar grid, drawn as annular sectors with a grey
/// scale normalised to the peak.
inline void polar_heatmap(std::ostream& os, const SampledField& f, const std::string& title, int max_rings = 96,
                          int max_sectors = 128) {
  const auto& g = f.grid();
  constexpr int size = 520;
  constexpr double c = size / 2.0;
  constexpr double rad = size / 2.0 - 30.0;
  const int ring_step = std::max(1, g.n_radial / max_rings);
  const int sector_step = std::max(1, g.n_azimuthal / max_sectors);
  double peak = 0.0;
  for (const auto& v : f.values()) peak = std::max(peak, std::norm(v));
  if (peak <= 0.0) peak = 1.0;

  detail::header(os, size, size);
  fmt::print(os, "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", c, detail::escape(title));
  fmt::print(os, "<circle cx=\"{0}\" cy=\"{0}\" r=\"{1}\" fill=\"black\"/>\n", c, rad);
  const double dphi = g.azimuthal_step() * sector_step;
  for (int i = 0; i < g.n_radial; i += ring_step) {
    const int i_end = std::min(g.n_radial, i + ring_step);
    const double r_in = (i == 0 ? 0.0 : 0.5 * (g.radial_nodes[i - 1] + g.radial_nodes[i])) / g.r_max * rad;
    const double r_out = (i_end == g.n_radial ? g.r_max : 0.5 * (g.radial_nodes[i_end - 1] + g.radial_nodes[i_end])) /
                         g.r_max * rad;
    for (int j = 0; j < g.n_azimuthal; j += sector_step) {
      const double level = std::sqrt(std::norm(f.at(i, j)) / peak);
      const int shade = static_cast<int>(std::lround(255.0 * std::clamp(level, 0.0, 1.0)));
      if (shade == 0) continue;
      const double a0 = j * g.azimuthal_step();
      const double a1 = a0 + dphi;
      auto pt = [&](double r, double a) { return std::pair{c + r * std::cos(a), c - r * std::sin(a)}; };
      const auto [x0, y0] = pt(r_in, a0);
      const auto [x1, y1] = pt(r_out, a0);
      const auto [x2, y2] = pt(r_out, a1);
      const auto [x3, y3] = pt(r_in, a1);
      fmt::print(os,
                 "<path d=\"M{:.2f},{:.2f}L{:.2f},{:.2f}A{:.2f},{:.2f} 0 0 0 {:.2f},{:.2f}L{:.2f},{:.2f}"
                 "A{:.2f},{:.2f} 0 0 1 {:.2f},{:.2f}Z\" fill=\"rgb({},{},{})\"/>\n",
                 x0, y0, x1, y1, r_out, r_out, x2, y2, x3, y3, r_in, r_in, x0, y0, shade, shade, shade);
    }
  }
  os << "</svg>\n";
}

}  // namespace fracoam::svg
