#include "msdg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace msdg {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

double to_axis(double v, bool log_scale) {
  if (!log_scale) return v;
  if (v <= 0.0) throw std::invalid_argument("svg: log scale requires positive data");
  return std::log10(v);
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    double span = hi - lo;
    if (span == 0.0) span = std::max(std::abs(lo), 1.0);
    lo -= 0.06 * span;
    hi += 0.06 * span;
  }
};

double nice_step(double raw) {
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double f : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (f * mag >= raw) return f * mag;
  return 10.0 * mag;
}

struct Tick {
  double pos;  // in axis coordinates (log10 when log scale)
  std::string label;
};

std::vector<Tick> make_ticks(const Range& r, bool log_scale) {
  std::vector<Tick> ticks;
  if (log_scale) {
    for (int d = static_cast<int>(std::ceil(r.lo)); d <= static_cast<int>(std::floor(r.hi)); ++d)
      ticks.push_back({static_cast<double>(d), fmt("%.3g", std::pow(10.0, d))});
    if (ticks.size() >= 2) return ticks;
    ticks.clear();
    const double step = (r.hi - r.lo) / 4.0;
    for (int k = 0; k <= 4; ++k) {
      const double p = r.lo + k * step;
      ticks.push_back({p, fmt("%.3g", std::pow(10.0, p))});
    }
    return ticks;
  }
  const double step = nice_step((r.hi - r.lo) / 4.0);
  for (double t = std::ceil(r.lo / step) * step; t <= r.hi + 1e-12 * step; t += step)
    ticks.push_back({t, fmt("%.4g", t == 0.0 ? 0.0 : t)});
  return ticks;
}

}  // namespace

std::string render_svg(const std::vector<Panel>& panels, int panel_width, int panel_height) {
  const int kLeft = 66, kRight = 18, kTop = 30, kBottom = 46, kGap = 26;
  const int total_w =
      static_cast<int>(panels.size()) * panel_width + (static_cast<int>(panels.size()) - 1) * kGap;
  const int total_h = panel_height;

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(total_w) +
         "\" height=\"" + std::to_string(total_h) + "\" viewBox=\"0 0 " + std::to_string(total_w) +
         " " + std::to_string(total_h) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const Panel& panel = panels[p];
    const double ox = static_cast<double>(p) * (panel_width + kGap);
    const double plot_x = ox + kLeft;
    const double plot_y = kTop;
    const double plot_w = panel_width - kLeft - kRight;
    const double plot_h = panel_height - kTop - kBottom;

    Range rx, ry;
    for (const Series& s : panel.series) {
      if (s.x.size() != s.y.size())
        throw std::invalid_argument("svg: series x and y lengths differ");
      for (double v : s.x) rx.add(to_axis(v, panel.log_x));
      for (double v : s.y) ry.add(to_axis(v, panel.log_y));
    }
    rx.pad();
    ry.pad();
    const auto X = [&](double v) {
      return plot_x + (to_axis(v, panel.log_x) - rx.lo) / (rx.hi - rx.lo) * plot_w;
    };
    const auto Y = [&](double v) {
      return plot_y + plot_h - (to_axis(v, panel.log_y) - ry.lo) / (ry.hi - ry.lo) * plot_h;
    };

    out += "<text x=\"" + fmt("%.2f", plot_x + plot_w / 2) + "\" y=\"" + fmt("%.2f", plot_y - 12) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + panel.title +
           "</text>\n";

    for (const Tick& t : make_ticks(rx, panel.log_x)) {
      const double px = plot_x + (t.pos - rx.lo) / (rx.hi - rx.lo) * plot_w;
      if (px < plot_x - 0.5 || px > plot_x + plot_w + 0.5) continue;
      out += "<line x1=\"" + fmt("%.2f", px) + "\" y1=\"" + fmt("%.2f", plot_y + plot_h) +
             "\" x2=\"" + fmt("%.2f", px) + "\" y2=\"" + fmt("%.2f", plot_y + plot_h + 5) +
             "\" stroke=\"#222\"/>\n";
      out += "<text x=\"" + fmt("%.2f", px) + "\" y=\"" + fmt("%.2f", plot_y + plot_h + 18) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + t.label +
             "</text>\n";
    }
    for (const Tick& t : make_ticks(ry, panel.log_y)) {
      const double py = plot_y + plot_h - (t.pos - ry.lo) / (ry.hi - ry.lo) * plot_h;
      if (py < plot_y - 0.5 || py > plot_y + plot_h + 0.5) continue;
      out += "<line x1=\"" + fmt("%.2f", plot_x - 5) + "\" y1=\"" + fmt("%.2f", py) + "\" x2=\"" +
             fmt("%.2f", plot_x) + "\" y2=\"" + fmt("%.2f", py) + "\" stroke=\"#222\"/>\n";
      out += "<text x=\"" + fmt("%.2f", plot_x - 8) + "\" y=\"" + fmt("%.2f", py + 4) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + t.label +
             "</text>\n";
    }

    out += "<rect x=\"" + fmt("%.2f", plot_x) + "\" y=\"" + fmt("%.2f", plot_y) + "\" width=\"" +
           fmt("%.2f", plot_w) + "\" height=\"" + fmt("%.2f", plot_h) +
           "\" fill=\"none\" stroke=\"#222\"/>\n";
    out += "<text x=\"" + fmt("%.2f", plot_x + plot_w / 2) + "\" y=\"" +
           fmt("%.2f", plot_y + plot_h + 36) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
           panel.x_label + "</text>\n";
    out += "<text x=\"" + fmt("%.2f", ox + 16) + "\" y=\"" + fmt("%.2f", plot_y + plot_h / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 " +
           fmt("%.2f", ox + 16) + " " + fmt("%.2f", plot_y + plot_h / 2) + ")\">" + panel.y_label +
           "</text>\n";

    for (std::size_t s = 0; s < panel.series.size(); ++s) {
      const Series& ser = panel.series[s];
      const char* color = kPalette[s % kPaletteSize];
      if (ser.x.size() > 1) {
        std::string pts;
        for (std::size_t k = 0; k < ser.x.size(); ++k)
          pts += fmt("%.2f", X(ser.x[k])) + "," + fmt("%.2f", Y(ser.y[k])) + " ";
        out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"1.5\"/>\n";
      }
      for (std::size_t k = 0; k < ser.x.size(); ++k)
        out += "<circle cx=\"" + fmt("%.2f", X(ser.x[k])) + "\" cy=\"" + fmt("%.2f", Y(ser.y[k])) +
               "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
      const double ly = plot_y + 14 + 14.0 * static_cast<double>(s);
      const double lx = plot_x + plot_w - 10;
      out += "<line x1=\"" + fmt("%.2f", lx - 52) + "\" y1=\"" + fmt("%.2f", ly - 4) + "\" x2=\"" +
             fmt("%.2f", lx - 36) + "\" y2=\"" + fmt("%.2f", ly - 4) + "\" stroke=\"" + color +
             "\" stroke-width=\"1.5\"/>\n";
      out += "<text x=\"" + fmt("%.2f", lx - 32) + "\" y=\"" + fmt("%.2f", ly) +
             "\" font-family=\"sans-serif\" font-size=\"11\">" + ser.label + "</text>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

void write_svg(const std::string& path, const std::vector<Panel>& panels, int panel_width,
               int panel_height) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("svg: cannot open '" + path + "' for writing");
  f << render_svg(panels, panel_width, panel_height);
  if (!f) throw std::runtime_error("svg: write failed for '" + path + "'");
}

}  // namespace msdg
