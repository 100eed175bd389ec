#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "conesta/bench.hpp"
#include "conesta/errors.hpp"
#include "conesta/trace_io.hpp"
#include "temp_dir.hpp"

using namespace conesta;

namespace {

SolverTrace synthetic_trace(std::initializer_list<std::pair<std::size_t, double>> points) {
  SolverTrace t;
  double s = 0.0;
  for (auto [k, f] : points) t.push_back({k, 0, f, f, f, 1.0, s += 0.5, false});
  return t;
}

}  // namespace

TEST(SolverNames, RoundTrip) {
  for (auto k : {SolverKind::conesta, SolverKind::fista_chen, SolverKind::fista_large, SolverKind::inexact}) {
    EXPECT_EQ(parse_solver_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_solver_kind("newton"), InvalidArgument);
}

TEST(AverageRanks, Examples) {
  const std::vector<double> distinct{3.0, 1.0, 2.0};
  EXPECT_EQ(average_ranks(distinct), (std::vector<double>{3.0, 1.0, 2.0}));
  const std::vector<double> tied{1.0, 1.0, 5.0};
  EXPECT_EQ(average_ranks(tied), (std::vector<double>{1.5, 1.5, 3.0}));
  const std::vector<double> inf{kInfinity, 2.0, kInfinity};
  EXPECT_EQ(average_ranks(inf), (std::vector<double>{2.5, 1.0, 2.5}));
  const std::vector<double> all{kInfinity, kInfinity};
  EXPECT_EQ(average_ranks(all), (std::vector<double>{1.5, 1.5}));
  const std::vector<double> one{4.0};
  EXPECT_EQ(average_ranks(one), (std::vector<double>{1.0}));
}

TEST(AverageRanks, SumIsTriangular) {
  const std::vector<double> c{4, 2, 2, 9, 4, 4, 1};
  const auto r = average_ranks(c);
  double sum = 0.0;
  for (double v : r) sum += v;
  EXPECT_DOUBLE_EQ(sum, 7.0 * 8.0 / 2.0);
}

TEST(AggregateRanks, MeansOverDatasets) {
  // Two datasets, two solvers, one level.
  const std::vector<std::vector<std::vector<double>>> costs{{{1.0}, {2.0}}, {{3.0}, {kInfinity}}};
  const RankTable t = aggregate_ranks(costs, {"a", "b"}, {1e-3});
  EXPECT_DOUBLE_EQ(t.mean_rank(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(t.mean_rank(1, 0), 2.0);
  const std::vector<std::vector<std::vector<double>>> tie{{{kInfinity}, {kInfinity}}};
  const RankTable u = aggregate_ranks(tie, {"a", "b"}, {1e-3});
  EXPECT_DOUBLE_EQ(u.mean_rank(0, 0), 1.5);
}

TEST(TimeToLevels, UsesErrorToOptimumWhenKnown) {
  const SolverTrace t = synthetic_trace({{0, 12.0}, {10, 10.5}, {20, 10.01}, {30, 10.0005}});
  const std::vector<double> levels{1.0, 1e-2, 1e-4};
  const auto hits = time_to_levels(t, levels, 10.0);
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(hits[0].iterations, 10u);
  EXPECT_DOUBLE_EQ(hits[0].seconds, 1.0);
  EXPECT_EQ(hits[1].iterations, 20u);
  EXPECT_FALSE(hits[2].iterations.has_value());
  EXPECT_EQ(hits[2].seconds, kInfinity);
}

TEST(TimeToLevels, FallsBackToGap) {
  SolverTrace t = synthetic_trace({{0, 5.0}, {4, 1e-3}});
  const std::vector<double> levels{1e-2};
  EXPECT_EQ(time_to_levels(t, levels, std::nullopt)[0].iterations, 4u);
}

TEST(BenchConfig, ParsesAndValidates) {
  const std::string text = R"({
    "seed": 3, "levels": [1.0, 0.1], "wall_cap": 5, "out": "o", "rank_by": "iters",
    "datasets": [{"design": {"n": 20, "p": 10, "seed": 7}, "replicates": 2, "label": "s"}],
    "solvers": [{"kind": "conesta"}, {"kind": "inexact", "name": "inx", "max_inner_total": 50}]
  })";
  const BenchConfig c = parse_bench_config(text, "/base");
  EXPECT_EQ(c.datasets.size(), 2u);
  EXPECT_EQ(c.datasets[1].design->seed, 8u);
  EXPECT_EQ(c.datasets[0].label, "s-seed7");
  EXPECT_EQ(c.solvers[1].name, "inx");
  EXPECT_EQ(c.solvers[0].config.eps, 0.1);
  EXPECT_EQ(c.solvers[1].config.max_inner_total, 50u);
  EXPECT_EQ(c.out_dir, std::filesystem::path("/base/o"));
  EXPECT_EQ(c.rank_by, RankClock::iterations);

  EXPECT_THROW(parse_bench_config("{", "."), InvalidArgument);
  EXPECT_THROW(parse_bench_config(R"({"datasets": [], "solvers": [{"kind": "conesta"}]})", "."),
               InvalidArgument);
  EXPECT_THROW(parse_bench_config(
                   R"({"levels": [0.1, 1.0], "datasets": [{"design": {}}], "solvers": [{"kind": "conesta"}]})",
                   "."),
               InvalidArgument);
  EXPECT_THROW(parse_bench_config(R"({"datasets": [{"design": {}}], "solvers": [{"kind": "bogus"}]})", "."),
               InvalidArgument);
}

TEST(RunBench, SmallGridIsDeterministicAcrossThreadCounts) {
  TempDir dir;
  const std::string text = R"({
    "levels": [1.0, 0.01], "rank_by": "iters", "out": "out",
    "datasets": [{"design": {"n": 30, "p": 15, "seed": 2}, "replicates": 2}],
    "solvers": [{"kind": "conesta", "max_inner_total": 20000},
                {"kind": "fista-chen", "max_inner_total": 2000}]
  })";
  const BenchConfig c = parse_bench_config(text, dir.path());
  const BenchReport one = run_bench(c, 1);
  const BenchReport two = run_bench(c, 2);
  ASSERT_EQ(one.runs.size(), 4u);
  EXPECT_EQ(one.ranks.mean_rank, two.ranks.mean_rank);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(one.runs[i].result.beta, two.runs[i].result.beta);
    EXPECT_EQ(one.runs[i].dataset, i / 2);
    EXPECT_EQ(one.runs[i].solver, i % 2);
  }
  // Mean ranks over two solvers sum to 3 at every level.
  for (Eigen::Index l = 0; l < one.ranks.mean_rank.cols(); ++l) {
    EXPECT_DOUBLE_EQ(one.ranks.mean_rank.col(l).sum(), 3.0);
  }

  write_bench_outputs(c, one);
  for (const char* f : {"ranks.csv", "iterations.csv", "seconds.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / f)) << f;
  }
  std::ifstream ranks(dir / "out" / "ranks.csv");
  std::string header;
  std::getline(ranks, header);
  EXPECT_EQ(header, "solver,level,mean_rank");
  std::size_t traces = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir / "out" / "traces")) {
    std::ifstream in(e.path());
    EXPECT_NO_THROW(read_trace_csv(in));
    ++traces;
  }
  EXPECT_EQ(traces, 4u);
}

TEST(RanksCsv, Format) {
  RankTable t;
  t.solvers = {"a"};
  t.levels = {0.5};
  t.mean_rank = Eigen::MatrixXd::Constant(1, 1, 1.0);
  std::stringstream ss;
  write_ranks_csv(ss, t);
  EXPECT_EQ(ss.str(), "solver,level,mean_rank\na,0.5,1\n");
}
