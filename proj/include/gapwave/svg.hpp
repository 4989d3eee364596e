#pragma once
// Self-contained SVG 1.1 line/scatter charts: linear or log10 axes, grid,
// tick labels, legend.  No external plotting dependency; output is a pure
// function of the inputs.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <vector>

namespace gapwave {

struct PlotSeries {
  std::string label;
  std::vector<std::array<double, 2>> points;
  bool line = true;
  bool markers = true;
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
  int width = 860;
  int height = 560;
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

inline std::string svg_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

// Tick label: shortest round-trip decimal for linear axes.
inline std::string tick_label(double v) {
  if (v == 0.0) return "0";
  char buf[48];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline const char* plot_color(std::size_t i) {
  static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                            "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  return palette[i % (sizeof(palette) / sizeof(palette[0]))];
}

}  // namespace detail

inline std::string render_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  const double ml = 76, mr = 24, mt = 44, mb = 60;
  const double pw = spec.width - ml - mr;
  const double ph = spec.height - mt - mb;

  const auto tx = [&](double v) { return spec.logx ? std::log10(v) : v; };
  const auto ty = [&](double v) { return spec.logy ? std::log10(v) : v; };
  const auto usable = [&](const std::array<double, 2>& p) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) return false;
    if (spec.logx && !(p[0] > 0.0)) return false;
    if (spec.logy && !(p[1] > 0.0)) return false;
    return true;
  };

  double xlo = 0, xhi = 0, ylo = 0, yhi = 0;
  bool any = false;
  for (const auto& s : series)
    for (const auto& p : s.points) {
      if (!usable(p)) continue;
      const double x = tx(p[0]);
      const double y = ty(p[1]);
      if (!any) {
        xlo = xhi = x;
        ylo = yhi = y;
        any = true;
      } else {
        xlo = std::min(xlo, x);
        xhi = std::max(xhi, x);
        ylo = std::min(ylo, y);
        yhi = std::max(yhi, y);
      }
    }
  if (!any) {
    xlo = ylo = 0;
    xhi = yhi = 1;
  }
  if (xhi - xlo < 1e-12) {
    xlo -= spec.logx ? 1.0 : 0.5;
    xhi += spec.logx ? 1.0 : 0.5;
  }
  if (yhi - ylo < 1e-12) {
    ylo -= spec.logy ? 1.0 : 0.5;
    yhi += spec.logy ? 1.0 : 0.5;
  }
  const double xpad = 0.04 * (xhi - xlo);
  const double ypad = 0.05 * (yhi - ylo);
  xlo -= xpad;
  xhi += xpad;
  ylo -= ypad;
  yhi += ypad;

  const auto px = [&](double v) { return ml + (tx(v) - xlo) / (xhi - xlo) * pw; };
  const auto py = [&](double v) { return mt + ph - (ty(v) - ylo) / (yhi - ylo) * ph; };

  // Tick positions on the transformed scale.
  const auto linear_ticks = [](double lo, double hi) {
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = 10.0 * mag;
    for (double m : {1.0, 2.0, 5.0})
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    std::vector<double> t;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step)
      t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return t;
  };
  const auto log_ticks = [](double lo, double hi) {
    const int a = static_cast<int>(std::ceil(lo - 1e-9));
    const int b = static_cast<int>(std::floor(hi + 1e-9));
    const int step = std::max(1, (b - a + 5) / 6);
    std::vector<double> t;
    for (int e = a; e <= b; e += step) t.push_back(static_cast<double>(e));
    return t;
  };
  const std::vector<double> xticks = spec.logx ? log_ticks(xlo, xhi) : linear_ticks(xlo, xhi);
  const std::vector<double> yticks = spec.logy ? log_ticks(ylo, yhi) : linear_ticks(ylo, yhi);

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(spec.width) + "\" height=\"" + std::to_string(spec.height) +
         "\" viewBox=\"0 0 " + std::to_string(spec.width) + " " + std::to_string(spec.height) +
         "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<g font-family=\"Helvetica, Arial, sans-serif\" font-size=\"12\">\n";

  // Grid and tick labels.
  for (double t : xticks) {
    const double x = ml + (t - xlo) / (xhi - xlo) * pw;
    svg += "<line x1=\"" + detail::svg_num(x) + "\" y1=\"" + detail::svg_num(mt) + "\" x2=\"" +
           detail::svg_num(x) + "\" y2=\"" + detail::svg_num(mt + ph) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    const std::string label =
        spec.logx ? "1e" + detail::tick_label(t) : detail::tick_label(t);
    svg += "<text x=\"" + detail::svg_num(x) + "\" y=\"" + detail::svg_num(mt + ph + 18) +
           "\" text-anchor=\"middle\">" + label + "</text>\n";
  }
  for (double t : yticks) {
    const double y = mt + ph - (t - ylo) / (yhi - ylo) * ph;
    svg += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" + detail::svg_num(y) + "\" x2=\"" +
           detail::svg_num(ml + pw) + "\" y2=\"" + detail::svg_num(y) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    const std::string label =
        spec.logy ? "1e" + detail::tick_label(t) : detail::tick_label(t);
    svg += "<text x=\"" + detail::svg_num(ml - 8) + "\" y=\"" + detail::svg_num(y + 4) +
           "\" text-anchor=\"end\">" + label + "</text>\n";
  }
  svg += "<rect x=\"" + detail::svg_num(ml) + "\" y=\"" + detail::svg_num(mt) + "\" width=\"" +
         detail::svg_num(pw) + "\" height=\"" + detail::svg_num(ph) +
         "\" fill=\"none\" stroke=\"#333333\"/>\n";

  // Series.
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = detail::plot_color(i);
    if (series[i].line) {
      std::string pts;
      for (const auto& p : series[i].points) {
        if (!usable(p)) continue;
        if (!pts.empty()) pts += ' ';
        pts += detail::svg_num(px(p[0])) + "," + detail::svg_num(py(p[1]));
      }
      if (!pts.empty())
        svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"1.8\"/>\n";
    }
    if (series[i].markers)
      for (const auto& p : series[i].points) {
        if (!usable(p)) continue;
        svg += "<circle cx=\"" + detail::svg_num(px(p[0])) + "\" cy=\"" +
               detail::svg_num(py(p[1])) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
      }
  }

  // Legend.
  if (!series.empty()) {
    const double lw = 200, row = 18;
    const double lx = ml + pw - lw - 10;
    const double lh = 10 + row * static_cast<double>(series.size());
    const double lyy = mt + 10;
    svg += "<rect x=\"" + detail::svg_num(lx) + "\" y=\"" + detail::svg_num(lyy) + "\" width=\"" +
           detail::svg_num(lw) + "\" height=\"" + detail::svg_num(lh) +
           "\" fill=\"white\" fill-opacity=\"0.85\" stroke=\"#cccccc\"/>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
      const double y = lyy + 13 + row * static_cast<double>(i);
      const char* color = detail::plot_color(i);
      svg += "<line x1=\"" + detail::svg_num(lx + 8) + "\" y1=\"" + detail::svg_num(y) +
             "\" x2=\"" + detail::svg_num(lx + 32) + "\" y2=\"" + detail::svg_num(y) +
             "\" stroke=\"" + color + "\" stroke-width=\"1.8\"/>\n";
      svg += "<circle cx=\"" + detail::svg_num(lx + 20) + "\" cy=\"" + detail::svg_num(y) +
             "\" r=\"3\" fill=\"" + std::string(color) + "\"/>\n";
      svg += "<text x=\"" + detail::svg_num(lx + 38) + "\" y=\"" + detail::svg_num(y + 4) +
             "\">" + detail::svg_escape(series[i].label) + "</text>\n";
    }
  }

  // Title and axis labels.
  svg += "<text x=\"" + detail::svg_num(ml + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" "
         "font-size=\"15\">" +
         detail::svg_escape(spec.title) + "</text>\n";
  svg += "<text x=\"" + detail::svg_num(ml + pw / 2) + "\" y=\"" +
         detail::svg_num(mt + ph + 42) + "\" text-anchor=\"middle\">" +
         detail::svg_escape(spec.xlabel) + "</text>\n";
  svg += "<text x=\"18\" y=\"" + detail::svg_num(mt + ph / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " + detail::svg_num(mt + ph / 2) +
         ")\">" + detail::svg_escape(spec.ylabel) + "</text>\n";
  svg += "</g>\n</svg>\n";
  return svg;
}

}  // namespace gapwave
