#include "morphgrad/cli/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace morphgrad {

namespace {

constexpr double kWidth = 760, kPanelHeight = 260, kLeft = 80, kRight = 170, kTop = 30,
                 kBottom = 40;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (lo > hi) lo = 0.0, hi = 1.0;
    if (lo == hi) {
      const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
      lo -= pad;
      hi += pad;
    }
  }
  double frac(double v) const { return (v - lo) / (hi - lo); }
};

void panel(std::ostringstream& svg, const std::vector<PlotSeries>& series,
           double HistoryRow::*field, const std::string& title, double top) {
  Range xs, ys;
  for (const PlotSeries& s : series)
    for (const HistoryRow& r : s.rows) {
      if (!std::isfinite(r.*field)) continue;
      xs.add(static_cast<double>(r.generation));
      ys.add(r.*field);
    }
  xs.settle();
  ys.settle();

  const double x0 = kLeft, x1 = kWidth - kRight;
  const double y0 = top + kPanelHeight - kBottom, y1 = top + kTop;
  auto px = [&](double x) { return x0 + xs.frac(x) * (x1 - x0); };
  auto py = [&](double y) { return y0 - ys.frac(y) * (y0 - y1); };

  svg << "<text x=\"" << num(x0) << "\" y=\"" << num(top + 18)
      << "\" font-size=\"14\" font-weight=\"bold\">" << escape(title) << "</text>\n";
  svg << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0)
      << "\" height=\"" << num(y0 - y1) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xs.lo + (xs.hi - xs.lo) * i / 4.0;
    const double fy = ys.lo + (ys.hi - ys.lo) * i / 4.0;
    svg << "<text x=\"" << num(px(fx)) << "\" y=\"" << num(y0 + 16)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << num(fx) << "</text>\n";
    svg << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(py(fy) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << num(fy) << "</text>\n";
    svg << "<line x1=\"" << num(x0) << "\" y1=\"" << num(py(fy)) << "\" x2=\"" << num(x1)
        << "\" y2=\"" << num(py(fy)) << "\" stroke=\"#ddd\"/>\n";
  }
  svg << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(y0 + 32)
      << "\" font-size=\"11\" text-anchor=\"middle\">generation</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % std::size(kColors)];
    std::ostringstream points;
    std::size_t n = 0;
    for (const HistoryRow& r : series[i].rows) {
      if (!std::isfinite(r.*field)) continue;
      const double gx = px(static_cast<double>(r.generation)), gy = py(r.*field);
      points << (n++ ? " " : "") << num(gx) << ',' << num(gy);
      svg << "<circle cx=\"" << num(gx) << "\" cy=\"" << num(gy) << "\" r=\"2.5\" fill=\""
          << color << "\"/>\n";
    }
    if (n > 1)
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
          << points.str() << "\"/>\n";
    const double ly = y1 + 16 + 18 * static_cast<double>(i);
    svg << "<line x1=\"" << num(x1 + 12) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
        << num(x1 + 32) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << num(x1 + 38) << "\" y=\"" << num(ly) << "\" font-size=\"12\">"
        << escape(series[i].label) << "</text>\n";
  }
}

}  // namespace

std::string render_history_svg(const std::vector<PlotSeries>& series) {
  std::ostringstream svg;
  const double height = 2 * kPanelHeight;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
      << num(height) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(height)
      << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  panel(svg, series, &HistoryRow::best_avg_score, "best_avg_score", 0.0);
  panel(svg, series, &HistoryRow::mean_fitness, "mean_fitness", kPanelHeight);
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace morphgrad
