#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "conesta/bench.hpp"
#include "conesta/dataset_io.hpp"
#include "conesta/errors.hpp"
#include "conesta/grid_mask.hpp"
#include "conesta/plot.hpp"
#include "conesta/simulation.hpp"
#include "conesta/solvers.hpp"
#include "conesta/trace_io.hpp"

namespace conesta::cli {

namespace fs = std::filesystem;

namespace {

struct SimulateArgs {
  SimulationDesign design;
  std::string correlation = "low";
  std::string flat_groups = "uniform";
  fs::path out;
};

struct SolveArgs {
  std::string solver = "conesta";
  std::string mode = "chen";
  std::optional<double> l1, l2, tv;
  double eps = 1e-6;
  double tau = 0.5;
  std::size_t max_inner_total = SolverConfig{}.max_inner_total;
  std::size_t max_inner_per_outer = SolverConfig{}.max_inner_per_outer;
  std::optional<double> mu;
  fs::path data;
  std::optional<fs::path> mask;
  std::optional<fs::path> warm_start;
  fs::path out;
};

struct BenchArgs {
  fs::path config;
  std::optional<std::string> rank_by;
  std::optional<fs::path> out;
  std::optional<std::size_t> threads;
};

struct PlotArgs {
  std::vector<fs::path> traces;
  fs::path out;
  std::optional<double> f_star;
  std::optional<fs::path> data;
  std::string title;
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InvalidArgument("cannot create " + dir.string() + ": " + ec.message());
}

std::string json_number(double v) {
  if (std::isfinite(v)) return format_double(v);
  return v > 0 ? "\"inf\"" : (v < 0 ? "\"-inf\"" : "\"nan\"");
}

int cmd_simulate(SimulateArgs& args, std::ostream& out) {
  args.design.correlation = parse_correlation(args.correlation);
  args.design.flat_groups = parse_flat_group_subgradient(args.flat_groups);
  args.design.validate();
  const LabeledDataset ds = simulate(args.design);
  write_dataset(args.out, ds);
  out << "f_star " << format_double(ds.f_star) << '\n';
  out << "kkt_residual " << format_double(ds.kkt_residual) << '\n';
  return kOk;
}

std::size_t env_threads() {
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("CONESTA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(cap, &end, 10);
    if (end == cap || *end != '\0' || v < 1) {
      throw InvalidArgument("CONESTA_THREADS must be a positive integer");
    }
    threads = std::min(threads, static_cast<std::size_t>(v));
  }
  return threads;
}

int cmd_solve(const SolveArgs& args, std::ostream& out) {
  LoadedData data = read_dataset(args.data);
  PenaltyWeights w = data.weights.value_or(SimulationDesign{}.weights);
  if (args.l1) w.l1 = *args.l1;
  if (args.l2) w.l2 = *args.l2;
  if (args.tv) w.tv = *args.tv;
  w.validate();

  const auto p = static_cast<std::size_t>(data.X.cols());
  const GridMask mask = args.mask ? load_mask(*args.mask) : GridMask::chain(p);
  if (mask.size() != p) {
    throw InvalidArgument("mask has " + std::to_string(mask.size()) + " voxels but X has " +
                          std::to_string(p) + " columns");
  }
  auto op = std::make_shared<const StructureOperator>(build_tv_operator(mask));
  const Problem problem(std::move(data.X), std::move(data.y), w, op);

  SolverSpec spec;
  if (args.solver == "fista-fixed") {
    if (args.mode == "chen") spec.kind = SolverKind::fista_chen;
    else if (args.mode == "large") spec.kind = SolverKind::fista_large;
    else throw InvalidArgument("--mode must be chen or large");
  } else {
    spec.kind = parse_solver_kind(args.solver);
  }
  spec.name = std::string(to_string(spec.kind));
  spec.config.eps = args.eps;
  spec.config.tau = args.tau;
  spec.config.max_inner_total = args.max_inner_total;
  spec.config.max_inner_per_outer = args.max_inner_per_outer;
  spec.config.mu_fixed = args.mu;
  spec.config.validate();

  Eigen::VectorXd beta0 = Eigen::VectorXd::Zero(problem.p());
  if (args.warm_start) {
    beta0 = read_vector_csv(*args.warm_start);
    if (beta0.size() != problem.p()) throw InvalidArgument("--warm-start has the wrong length");
  }

  const SolverResult result = run_solver(spec, problem, beta0);
  const double f = f_value(problem, result.beta);

  ensure_dir(args.out);
  write_vector_csv(args.out / "beta.csv", result.beta);
  {
    auto trace = open_output(args.out / "trace.csv");
    write_trace_csv(trace, result.trace);
  }
  {
    auto json = open_output(args.out / "result.json");
    json << "{\n";
    json << "  \"solver\": \"" << spec.name << "\",\n";
    json << "  \"converged\": " << (result.converged ? "true" : "false") << ",\n";
    json << "  \"f\": " << json_number(f) << ",\n";
    json << "  \"gap\": " << json_number(result.final_gap) << ",\n";
    if (data.f_star && data.beta_star) {
      json << "  \"error_to_optimum\": " << json_number(f - *data.f_star) << ",\n";
    }
    json << "  \"eps\": " << json_number(args.eps) << ",\n";
    json << "  \"iterations\": " << result.iterations << ",\n";
    json << "  \"outer_steps\": " << count_outer_steps(result.trace) << ",\n";
    json << "  \"weights\": {\"l1\": " << json_number(w.l1) << ", \"l2\": " << json_number(w.l2)
         << ", \"tv\": " << json_number(w.tv) << "},\n";
    json << "  \"beta\": \"beta.csv\",\n";
    json << "  \"trace\": \"trace.csv\"\n";
    json << "}\n";
  }
  out << "converged " << (result.converged ? "true" : "false") << '\n';
  out << "f " << format_double(f) << '\n';
  out << "gap " << format_double(result.final_gap) << '\n';
  out << "iterations " << result.iterations << '\n';
  return kOk;
}

int cmd_bench(const BenchArgs& args, std::ostream& out) {
  std::ifstream in(args.config);
  if (!in) throw InvalidArgument("cannot open " + args.config.string());
  std::stringstream text;
  text << in.rdbuf();
  BenchConfig config = parse_bench_config(text.str(), args.config.parent_path());
  if (args.rank_by) {
    if (*args.rank_by == "iters") config.rank_by = RankClock::iterations;
    else if (*args.rank_by == "time") config.rank_by = RankClock::time;
    else throw InvalidArgument("--rank-by must be iters or time");
  }
  if (args.out) config.out_dir = *args.out;
  const std::size_t threads = args.threads ? std::max<std::size_t>(1, *args.threads) : env_threads();

  const BenchReport report = run_bench(config, threads);
  write_bench_outputs(config, report);
  write_ranks_csv(out, report.ranks);
  return kOk;
}

int cmd_plot(const PlotArgs& args, std::ostream& out) {
  std::vector<PlotSeries> series;
  for (const auto& path : args.traces) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    series.push_back({path.stem().string(), read_trace_csv(in)});
  }
  PlotOptions options;
  options.title = args.title;
  options.f_star = args.f_star;
  if (!options.f_star && args.data) {
    const LoadedData data = read_dataset(*args.data);
    if (!data.f_star) throw InvalidArgument("--data has no f_star in meta.json");
    options.f_star = data.f_star;
  }
  const std::string svg = render_convergence_svg(series, options);
  if (args.out.has_parent_path()) ensure_dir(args.out.parent_path());
  auto file = open_output(args.out);
  file << svg;
  out << "wrote " << args.out.string() << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structured sparse regression solvers and benchmarks", "conesta"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Generate a dataset with a known minimizer");
  simulate_cmd->add_option("--n", sim.design.n, "Number of samples");
  simulate_cmd->add_option("--p", sim.design.p, "Number of variables");
  simulate_cmd->add_option("--correlation", sim.correlation, "low, medium or high");
  simulate_cmd->add_option("--sparsity", sim.design.sparsity, "Fraction of zero coefficients");
  simulate_cmd->add_option("--snr", sim.design.snr, "Residual norm is 1/snr");
  simulate_cmd->add_option("--seed", sim.design.seed, "Random seed");
  simulate_cmd->add_option("--l1", sim.design.weights.l1, "l1 weight");
  simulate_cmd->add_option("--l2", sim.design.weights.l2, "Ridge weight");
  simulate_cmd->add_option("--tv", sim.design.weights.tv, "Total variation weight");
  simulate_cmd->add_option("--flat-groups", sim.flat_groups,
                           "Certificate on flat TV groups: zero or uniform");
  simulate_cmd->add_option("--out", sim.out, "Output directory")->required();

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Run one solver on a dataset");
  solve_cmd->add_option("--solver", solve.solver,
                        "conesta, fista-fixed, fista-chen, fista-large or inexact");
  solve_cmd->add_option("--mode", solve.mode, "Smoothing of fista-fixed: chen or large");
  solve_cmd->add_option("--l1", solve.l1, "l1 weight (default: dataset meta.json)");
  solve_cmd->add_option("--l2", solve.l2, "Ridge weight (default: dataset meta.json)");
  solve_cmd->add_option("--tv", solve.tv, "Total variation weight (default: dataset meta.json)");
  solve_cmd->add_option("--eps", solve.eps, "Target precision");
  solve_cmd->add_option("--tau", solve.tau, "Continuation factor");
  solve_cmd->add_option("--max-inner-total", solve.max_inner_total, "Total inner iteration budget");
  solve_cmd->add_option("--max-inner-per-outer", solve.max_inner_per_outer,
                        "Inner iteration budget per continuation step");
  solve_cmd->add_option("--mu", solve.mu, "Override the fixed smoothing parameter");
  solve_cmd->add_option("--data", solve.data, "Dataset directory with X.csv and y.csv")->required();
  solve_cmd->add_option("--mask", solve.mask, "Grid mask file (default: 1D chain over p)");
  solve_cmd->add_option("--warm-start", solve.warm_start, "Initial beta as a CSV column");
  solve_cmd->add_option("--out", solve.out, "Output directory")->required();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Rank solvers over several datasets");
  bench_cmd->add_option("config", bench.config, "JSON configuration file")->required();
  bench_cmd->add_option("--rank-by", bench.rank_by, "iters or time");
  bench_cmd->add_option("--out", bench.out, "Output directory (overrides the config)");
  bench_cmd->add_option("--threads", bench.threads, "Worker threads (default: CONESTA_THREADS)");

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "Draw convergence traces as SVG");
  plot_cmd->add_option("traces", plot.traces, "Trace CSV files")->required();
  plot_cmd->add_option("--out", plot.out, "SVG file")->required();
  plot_cmd->add_option("--f-star", plot.f_star, "Optimal value; plots f - f_star");
  plot_cmd->add_option("--data", plot.data, "Dataset directory providing f_star");
  plot_cmd->add_option("--title", plot.title, "Figure title");

  try {
    std::vector<std::string> rest(args.rbegin(), args.rend());
    if (!rest.empty()) rest.pop_back();
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidArgument;
  }

  try {
    if (*simulate_cmd) return cmd_simulate(sim, out);
    if (*solve_cmd) return cmd_solve(solve, out);
    if (*bench_cmd) return cmd_bench(bench, out);
    if (*plot_cmd) return cmd_plot(plot, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidArgument;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kInvalidArgument;
}

}  // namespace conesta::cli
