#include <gtest/gtest.h>

#include <string>

#include "conesta/plot.hpp"

using namespace conesta;

namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

SolverTrace stepped_trace(std::size_t steps, std::size_t per_step) {
  SolverTrace t;
  std::size_t k = 0;
  double err = 1.0;
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < per_step; ++i) {
      t.push_back({k, s, err, err, err, 0.1, 0.01 * static_cast<double>(k), false});
      k += 10;
      err *= 0.5;
    }
  }
  return t;
}

}  // namespace

TEST(Plot, CountsOuterSteps) {
  EXPECT_EQ(count_outer_steps(stepped_trace(4, 3)), 4u);
  EXPECT_EQ(count_outer_steps({}), 0u);
}

TEST(Plot, TwoPanelsWithStepMarkers) {
  const std::vector<PlotSeries> series{{"conesta", stepped_trace(5, 3)}, {"fista", stepped_trace(1, 10)}};
  const std::string svg = render_convergence_svg(series);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(count(svg, "class=\"xlabel\""), 2u);
  EXPECT_NE(svg.find(">seconds<"), std::string::npos);
  EXPECT_NE(svg.find(">iterations<"), std::string::npos);
  EXPECT_EQ(count(svg, "class=\"series\""), 4u);
  // Five continuation steps, marked once per panel; the one-step series has none.
  EXPECT_EQ(count(svg, "class=\"step\""), 10u);
  EXPECT_EQ(count(svg, "class=\"legend\""), 2u);
}

TEST(Plot, UsesErrorToOptimumAndHandlesZero) {
  PlotOptions opts;
  opts.f_star = 1.0;
  SolverTrace t = stepped_trace(1, 4);
  t.back().f = 1.0;  // exact hit maps to the floor instead of log(0)
  const std::vector<PlotSeries> series{{"s", t}};
  const std::string svg = render_convergence_svg(series, opts);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  EXPECT_EQ(svg.find("inf"), std::string::npos);
  EXPECT_NE(svg.find("1e-16"), std::string::npos);
}

TEST(Plot, RejectsTinyPanels) {
  PlotOptions opts;
  opts.panel_width = 10;
  const std::vector<PlotSeries> series{{"s", stepped_trace(1, 2)}};
  EXPECT_ANY_THROW(render_convergence_svg(series, opts));
}
