#pragma once

#include <optional>
#include <span>
#include <string>

#include "conesta/solvers.hpp"

namespace conesta {

struct PlotSeries {
  std::string label;
  SolverTrace trace;
};

struct PlotOptions {
  // When set, the plotted error is f - f_star; otherwise the recorded gap.
  std::optional<double> f_star;
  std::string title;
  int panel_width = 480;
  int panel_height = 360;
};

// Self-contained SVG with two panels (error vs. seconds, error vs.
// iterations) on a log10 vertical axis. The last record of every
// continuation step of a series is marked with a dot when the series has
// more than one step.
std::string render_convergence_svg(std::span<const PlotSeries> series,
                                   const PlotOptions& options = {});

// Number of distinct `outer` indices in a trace.
std::size_t count_outer_steps(const SolverTrace& trace);

}  // namespace conesta
