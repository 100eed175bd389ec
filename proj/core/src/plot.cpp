#include "conesta/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "conesta/errors.hpp"

namespace conesta {

std::size_t count_outer_steps(const SolverTrace& trace) {
  std::set<std::size_t> seen;
  for (const auto& rec : trace) seen.insert(rec.outer);
  return seen.size();
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
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

struct Point {
  double x;
  double log_err;
  bool step_end;
};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(lo < hi)) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

// Errors at or below zero cannot be drawn on a log axis; they are pinned to
// this floor instead.
constexpr double kErrorFloor = 1e-16;

std::vector<Point> points_of(const SolverTrace& trace, const PlotOptions& options, bool by_time) {
  std::vector<Point> pts;
  const bool mark = count_outer_steps(trace) > 1;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& rec = trace[i];
    const double err = options.f_star ? rec.f - *options.f_star : rec.gap;
    const double x = by_time ? rec.seconds : static_cast<double>(rec.k);
    const bool last_of_step = i + 1 == trace.size() || trace[i + 1].outer != rec.outer;
    if (!std::isfinite(err) || !std::isfinite(x)) continue;
    pts.push_back({x, std::log10(std::max(err, kErrorFloor)), mark && last_of_step});
  }
  return pts;
}

void draw_panel(std::ostringstream& svg, std::span<const PlotSeries> series,
                const PlotOptions& options, bool by_time, double x0, double y0) {
  const double w = options.panel_width;
  const double h = options.panel_height;
  const double left = 70, right = 20, top = 30, bottom = 50;
  const double pw = w - left - right;
  const double ph = h - top - bottom;

  std::vector<std::vector<Point>> all;
  Range xr, yr;
  for (const auto& s : series) {
    all.push_back(points_of(s.trace, options, by_time));
    for (const auto& p : all.back()) {
      xr.add(p.x);
      yr.add(p.log_err);
    }
  }
  if (!std::isfinite(xr.lo)) {
    xr = {0.0, 1.0};
    yr = {0.0, 1.0};
  }
  xr.pad();
  yr.lo = std::floor(yr.lo);
  yr.hi = std::ceil(yr.hi);
  yr.pad();

  const auto px = [&](double x) { return x0 + left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  const auto py = [&](double ly) { return y0 + top + (yr.hi - ly) / (yr.hi - yr.lo) * ph; };

  svg << "<g>\n";
  svg << "<rect x=\"" << fmt(x0 + left) << "\" y=\"" << fmt(y0 + top) << "\" width=\"" << fmt(pw)
      << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#000\"/>\n";

  // Decade ticks on the error axis.
  const int step = std::max(1, static_cast<int>((yr.hi - yr.lo) / 8.0));
  for (int d = static_cast<int>(yr.lo); d <= static_cast<int>(yr.hi); d += step) {
    const double y = py(d);
    svg << "<line x1=\"" << fmt(x0 + left - 4) << "\" y1=\"" << fmt(y) << "\" x2=\""
        << fmt(x0 + left + pw) << "\" y2=\"" << fmt(y) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << fmt(x0 + left - 8) << "\" y=\"" << fmt(y + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  for (int t = 0; t <= 4; ++t) {
    const double xv = xr.lo + (xr.hi - xr.lo) * t / 4.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", xv);
    svg << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(y0 + top + ph + 16)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << buf << "</text>\n";
  }
  svg << "<text class=\"xlabel\" x=\"" << fmt(x0 + left + pw / 2) << "\" y=\""
      << fmt(y0 + h - 12) << "\" font-size=\"13\" text-anchor=\"middle\">"
      << (by_time ? "seconds" : "iterations") << "</text>\n";
  svg << "<text class=\"ylabel\" x=\"" << fmt(x0 + 16) << "\" y=\"" << fmt(y0 + top + ph / 2)
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 " << fmt(x0 + 16)
      << ' ' << fmt(y0 + top + ph / 2) << ")\">error</text>\n";

  for (std::size_t i = 0; i < all.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    if (all[i].empty()) continue;
    svg << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : all[i]) svg << fmt(px(p.x)) << ',' << fmt(py(p.log_err)) << ' ';
    svg << "\"/>\n";
    for (const auto& p : all[i]) {
      if (!p.step_end) continue;
      svg << "<circle class=\"step\" cx=\"" << fmt(px(p.x)) << "\" cy=\"" << fmt(py(p.log_err))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
  }
  svg << "</g>\n";
}

}  // namespace

std::string render_convergence_svg(std::span<const PlotSeries> series, const PlotOptions& options) {
  if (options.panel_width < 160 || options.panel_height < 120) {
    throw InvalidArgument("plot: panels must be at least 160x120");
  }
  const double legend_h = 20.0 * static_cast<double>(series.size()) + 10.0;
  const double title_h = options.title.empty() ? 0.0 : 24.0;
  const double width = 2.0 * options.panel_width;
  const double height = options.panel_height + legend_h + title_h;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
      << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height)
      << "\" font-family=\"sans-serif\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  if (!options.title.empty()) {
    svg << "<text x=\"" << fmt(width / 2) << "\" y=\"18\" font-size=\"15\" text-anchor=\"middle\">"
        << escape(options.title) << "</text>\n";
  }
  draw_panel(svg, series, options, true, 0.0, title_h);
  draw_panel(svg, series, options, false, options.panel_width, title_h);

  double y = title_h + options.panel_height + 14.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    svg << "<line x1=\"70\" y1=\"" << fmt(y) << "\" x2=\"100\" y2=\"" << fmt(y) << "\" stroke=\""
        << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text class=\"legend\" x=\"108\" y=\"" << fmt(y + 4) << "\" font-size=\"12\">"
        << escape(series[i].label) << "</text>\n";
    y += 20.0;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace conesta
