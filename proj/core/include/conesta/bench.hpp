#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conesta/simulation.hpp"
#include "conesta/solvers.hpp"

namespace conesta {

enum class SolverKind { conesta, fista_chen, fista_large, inexact };

std::string_view to_string(SolverKind kind);
// Accepts conesta, fista-chen, fista-large, inexact.
SolverKind parse_solver_kind(std::string_view name);

struct SolverSpec {
  std::string name;
  SolverKind kind = SolverKind::conesta;
  SolverConfig config;
  InexactOptions inexact;
};

SolverResult run_solver(const SolverSpec& spec, const Problem& problem,
                        const Eigen::VectorXd& beta0);

// First trace record reaching each precision level. The error is
// f - f_star when f_star is known, else the recorded gap.
struct LevelHit {
  std::optional<std::size_t> iterations;
  double seconds = kInfinity;
};

std::vector<LevelHit> time_to_levels(const SolverTrace& trace, std::span<const double> levels,
                                     std::optional<double> f_star);

// Ranks 1..n of `costs` (smaller is better); tied entries, including equal
// infinities, share the average of their positions.
std::vector<double> average_ranks(std::span<const double> costs);

enum class RankClock { time, iterations };

struct RankTable {
  std::vector<std::string> solvers;
  std::vector<double> levels;
  // mean_rank(solver, level), averaged over datasets.
  Eigen::MatrixXd mean_rank;
};

// costs[dataset][solver][level]; unreached levels are +infinity.
RankTable aggregate_ranks(const std::vector<std::vector<std::vector<double>>>& costs,
                          std::vector<std::string> solvers, std::vector<double> levels);

struct DatasetSource {
  std::optional<std::filesystem::path> path;
  std::optional<SimulationDesign> design;
  std::string label;
};

struct BenchConfig {
  std::vector<DatasetSource> datasets;
  std::vector<SolverSpec> solvers;
  std::vector<double> levels{1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  double wall_cap_seconds = kInfinity;
  std::filesystem::path out_dir = "bench_out";
  std::uint64_t seed = 1;
  RankClock rank_by = RankClock::time;

  // At least one dataset and solver, strictly decreasing positive levels.
  void validate() const;
};

// Parses the JSON bench configuration. Relative dataset paths resolve
// against `base_dir`. See README for the schema.
BenchConfig parse_bench_config(const std::string& json_text,
                               const std::filesystem::path& base_dir = {});

struct BenchRun {
  std::size_t dataset = 0;
  std::size_t solver = 0;
  SolverResult result;
  std::vector<LevelHit> hits;
  std::optional<double> f_star;
};

struct BenchReport {
  RankTable ranks;
  std::vector<BenchRun> runs;  // ordered by (dataset, solver)
  std::vector<std::string> dataset_labels;
};

// Runs every dataset x solver cell on up to `threads` worker threads. Each
// cell is single-threaded; results are merged in (dataset, solver) order.
BenchReport run_bench(const BenchConfig& config, std::size_t threads = 1);

// ranks.csv: `solver,level,mean_rank`.
void write_ranks_csv(std::ostream& out, const RankTable& table);

// Writes ranks.csv, iterations.csv, seconds.csv and one trace per cell under
// config.out_dir.
void write_bench_outputs(const BenchConfig& config, const BenchReport& report);

}  // namespace conesta
