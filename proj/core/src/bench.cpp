#include "conesta/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "conesta/dataset_io.hpp"
#include "conesta/errors.hpp"
#include "conesta/structure_operator.hpp"
#include "conesta/trace_io.hpp"

namespace conesta {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::conesta: return "conesta";
    case SolverKind::fista_chen: return "fista-chen";
    case SolverKind::fista_large: return "fista-large";
    case SolverKind::inexact: return "inexact";
  }
  return "unknown";
}

SolverKind parse_solver_kind(std::string_view name) {
  if (name == "conesta") return SolverKind::conesta;
  if (name == "fista-chen") return SolverKind::fista_chen;
  if (name == "fista-large") return SolverKind::fista_large;
  if (name == "inexact") return SolverKind::inexact;
  throw InvalidArgument("unknown solver kind '" + std::string(name) + "'");
}

SolverResult run_solver(const SolverSpec& spec, const Problem& problem,
                        const Eigen::VectorXd& beta0) {
  switch (spec.kind) {
    case SolverKind::conesta: return conesta(problem, beta0, spec.config);
    case SolverKind::fista_chen: return fista_fixed_mu(problem, beta0, spec.config, FixedMuMode::chen);
    case SolverKind::fista_large:
      return fista_fixed_mu(problem, beta0, spec.config, FixedMuMode::large);
    case SolverKind::inexact: return inexact_fista(problem, beta0, spec.config, spec.inexact);
  }
  throw InvalidArgument("run_solver: unknown solver kind");
}

std::vector<LevelHit> time_to_levels(const SolverTrace& trace, std::span<const double> levels,
                                     std::optional<double> f_star) {
  std::vector<LevelHit> hits(levels.size());
  std::size_t next = 0;
  for (const auto& rec : trace) {
    const double err = f_star ? rec.f - *f_star : rec.gap;
    // Levels are decreasing, so one record can satisfy several at once.
    while (next < levels.size() && err <= levels[next]) {
      hits[next].iterations = rec.k;
      hits[next].seconds = rec.seconds;
      ++next;
    }
    if (next == levels.size()) break;
  }
  return hits;
}

std::vector<double> average_ranks(std::span<const double> costs) {
  const std::size_t n = costs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && costs[order[j]] == costs[order[i]]) ++j;
    // Positions i+1 .. j share their mean.
    const double shared = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t q = i; q < j; ++q) ranks[order[q]] = shared;
    i = j;
  }
  return ranks;
}

RankTable aggregate_ranks(const std::vector<std::vector<std::vector<double>>>& costs,
                          std::vector<std::string> solvers, std::vector<double> levels) {
  RankTable table;
  const auto ns = static_cast<Eigen::Index>(solvers.size());
  const auto nl = static_cast<Eigen::Index>(levels.size());
  table.mean_rank = Eigen::MatrixXd::Zero(ns, nl);
  if (costs.empty()) throw InvalidArgument("aggregate_ranks: no datasets");
  for (const auto& per_dataset : costs) {
    if (static_cast<Eigen::Index>(per_dataset.size()) != ns) {
      throw InvalidArgument("aggregate_ranks: solver count mismatch");
    }
    for (Eigen::Index l = 0; l < nl; ++l) {
      std::vector<double> column(static_cast<std::size_t>(ns));
      for (Eigen::Index s = 0; s < ns; ++s) {
        const auto& row = per_dataset[static_cast<std::size_t>(s)];
        if (static_cast<Eigen::Index>(row.size()) != nl) {
          throw InvalidArgument("aggregate_ranks: level count mismatch");
        }
        column[static_cast<std::size_t>(s)] = row[static_cast<std::size_t>(l)];
      }
      const auto r = average_ranks(column);
      for (Eigen::Index s = 0; s < ns; ++s) table.mean_rank(s, l) += r[static_cast<std::size_t>(s)];
    }
  }
  table.mean_rank /= static_cast<double>(costs.size());
  table.solvers = std::move(solvers);
  table.levels = std::move(levels);
  return table;
}

void BenchConfig::validate() const {
  if (datasets.empty()) throw InvalidArgument("bench config: at least one dataset is required");
  if (solvers.empty()) throw InvalidArgument("bench config: at least one solver is required");
  if (levels.empty()) throw InvalidArgument("bench config: at least one precision level is required");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] > 0.0) || !std::isfinite(levels[i])) {
      throw InvalidArgument("bench config: precision levels must be positive and finite");
    }
    if (i > 0 && !(levels[i] < levels[i - 1])) {
      throw InvalidArgument("bench config: precision levels must be strictly decreasing");
    }
  }
  if (!(wall_cap_seconds > 0.0)) throw InvalidArgument("bench config: wall_cap must be positive");
  for (const auto& d : datasets) {
    if (d.path.has_value() == d.design.has_value()) {
      throw InvalidArgument("bench config: each dataset needs exactly one of path or design");
    }
    if (d.design) d.design->validate();
  }
  for (const auto& s : solvers) s.config.validate();
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

SimulationDesign parse_design(const json& j, std::uint64_t default_seed) {
  SimulationDesign d;
  d.n = get_or<std::size_t>(j, "n", d.n);
  d.p = get_or<std::size_t>(j, "p", d.p);
  if (j.contains("correlation")) d.correlation = parse_correlation(j.at("correlation").get<std::string>());
  d.sparsity = get_or(j, "sparsity", d.sparsity);
  d.snr = get_or(j, "snr", d.snr);
  d.seed = get_or<std::uint64_t>(j, "seed", default_seed);
  if (j.contains("flat_groups")) {
    d.flat_groups = parse_flat_group_subgradient(j.at("flat_groups").get<std::string>());
  }
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    d.weights.l1 = get_or(w, "l1", d.weights.l1);
    d.weights.l2 = get_or(w, "l2", d.weights.l2);
    d.weights.tv = get_or(w, "tv", d.weights.tv);
  }
  return d;
}

}  // namespace

BenchConfig parse_bench_config(const std::string& json_text, const fs::path& base_dir) {
  BenchConfig config;
  try {
    const json root = json::parse(json_text);
    if (!root.is_object()) throw InvalidArgument("bench config: top level must be an object");
    config.seed = get_or<std::uint64_t>(root, "seed", config.seed);
    if (root.contains("levels")) config.levels = root.at("levels").get<std::vector<double>>();
    if (root.contains("wall_cap")) config.wall_cap_seconds = root.at("wall_cap").get<double>();
    if (root.contains("out")) {
      fs::path out = root.at("out").get<std::string>();
      config.out_dir = out.is_relative() && !base_dir.empty() ? base_dir / out : out;
    }
    if (root.contains("rank_by")) {
      const auto clock = root.at("rank_by").get<std::string>();
      if (clock == "time") config.rank_by = RankClock::time;
      else if (clock == "iters" || clock == "iterations") config.rank_by = RankClock::iterations;
      else throw InvalidArgument("bench config: rank_by must be 'time' or 'iters'");
    }

    for (const auto& entry : root.at("datasets")) {
      if (entry.contains("path")) {
        DatasetSource src;
        fs::path path = entry.at("path").get<std::string>();
        src.path = path.is_relative() && !base_dir.empty() ? base_dir / path : path;
        src.label = get_or<std::string>(entry, "label", path.filename().string().empty()
                                                             ? path.parent_path().filename().string()
                                                             : path.filename().string());
        config.datasets.push_back(std::move(src));
        continue;
      }
      const SimulationDesign base = parse_design(entry.at("design"), config.seed);
      const auto replicates = get_or<std::size_t>(entry, "replicates", 1);
      const std::string label = get_or<std::string>(entry, "label", "sim");
      for (std::size_t r = 0; r < replicates; ++r) {
        DatasetSource src;
        SimulationDesign d = base;
        d.seed = base.seed + r;
        src.design = d;
        src.label = label + "-seed" + std::to_string(d.seed);
        config.datasets.push_back(std::move(src));
      }
    }

    for (const auto& entry : root.at("solvers")) {
      SolverSpec spec;
      spec.kind = parse_solver_kind(entry.at("kind").get<std::string>());
      spec.name = get_or<std::string>(entry, "name", std::string(to_string(spec.kind)));
      auto& c = spec.config;
      // Solvers run down to the finest level unless told otherwise.
      c.eps = get_or(entry, "eps", config.levels.back());
      c.tau = get_or(entry, "tau", c.tau);
      c.max_outer = get_or(entry, "max_outer", c.max_outer);
      c.max_inner_total = get_or(entry, "max_inner_total", c.max_inner_total);
      c.max_inner_per_outer = get_or(entry, "max_inner_per_outer", c.max_inner_per_outer);
      c.gap_check_period = get_or(entry, "gap_check_period", c.gap_check_period);
      if (entry.contains("mu")) c.mu_fixed = entry.at("mu").get<double>();
      c.wall_cap_seconds = config.wall_cap_seconds;
      spec.inexact.delta = get_or(entry, "delta", spec.inexact.delta);
      spec.inexact.max_prox_iterations =
          get_or(entry, "max_prox_iterations", spec.inexact.max_prox_iterations);
      config.solvers.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bench config: ") + e.what());
  }
  config.validate();
  return config;
}

namespace {

struct BenchDataset {
  std::optional<Problem> problem;
  std::optional<double> f_star;
};

BenchDataset materialize(const DatasetSource& src) {
  BenchDataset out;
  if (src.design) {
    LabeledDataset d = simulate(*src.design);
    out.f_star = d.f_star;
    out.problem.emplace(std::move(d.X), std::move(d.y), d.design.weights, d.op);
    return out;
  }
  LoadedData data = read_dataset(*src.path);
  const PenaltyWeights w = data.weights.value_or(SimulationDesign{}.weights);
  auto op = std::make_shared<const StructureOperator>(
      build_tv_operator(GridMask::chain(static_cast<std::size_t>(data.X.cols()))));
  if (data.beta_star) out.f_star = data.f_star;
  out.problem.emplace(std::move(data.X), std::move(data.y), w, std::move(op));
  return out;
}

}  // namespace

BenchReport run_bench(const BenchConfig& config, std::size_t threads) {
  config.validate();
  const std::size_t nd = config.datasets.size();
  const std::size_t ns = config.solvers.size();

  std::vector<BenchDataset> datasets;
  datasets.reserve(nd);
  for (const auto& src : config.datasets) datasets.push_back(materialize(src));
  // Compute the cached constants up front so workers only read shared state.
  for (auto& d : datasets) {
    d.problem->lipschitz_g();
    d.problem->op().spectral_norm();
  }

  BenchReport report;
  report.runs.resize(nd * ns);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    for (std::size_t cell = next++; cell < nd * ns; cell = next++) {
      const std::size_t di = cell / ns;
      const std::size_t si = cell % ns;
      try {
        const Problem& problem = *datasets[di].problem;
        BenchRun run;
        run.dataset = di;
        run.solver = si;
        run.f_star = datasets[di].f_star;
        run.result = run_solver(config.solvers[si], problem, Eigen::VectorXd::Zero(problem.p()));
        run.hits = time_to_levels(run.result.trace, config.levels, run.f_star);
        report.runs[cell] = std::move(run);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const std::size_t n_workers = std::clamp<std::size_t>(threads, 1, nd * ns);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<std::vector<std::vector<double>>> costs(
      nd, std::vector<std::vector<double>>(ns, std::vector<double>(config.levels.size(), kInfinity)));
  for (const auto& run : report.runs) {
    for (std::size_t l = 0; l < run.hits.size(); ++l) {
      const auto& hit = run.hits[l];
      if (!hit.iterations) continue;
      costs[run.dataset][run.solver][l] = config.rank_by == RankClock::iterations
                                              ? static_cast<double>(*hit.iterations)
                                              : hit.seconds;
    }
  }
  std::vector<std::string> names;
  for (const auto& s : config.solvers) names.push_back(s.name);
  report.ranks = aggregate_ranks(costs, std::move(names), config.levels);
  for (const auto& src : config.datasets) report.dataset_labels.push_back(src.label);
  return report;
}

void write_ranks_csv(std::ostream& out, const RankTable& table) {
  out << "solver,level,mean_rank\n";
  for (std::size_t s = 0; s < table.solvers.size(); ++s) {
    for (std::size_t l = 0; l < table.levels.size(); ++l) {
      out << table.solvers[s] << ',' << format_double(table.levels[l]) << ','
          << format_double(table.mean_rank(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(l)))
          << '\n';
    }
  }
}

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  return out;
}

}  // namespace

void write_bench_outputs(const BenchConfig& config, const BenchReport& report) {
  std::error_code ec;
  fs::create_directories(config.out_dir / "traces", ec);
  if (ec) throw InvalidArgument("cannot create " + config.out_dir.string() + ": " + ec.message());

  {
    auto out = open_output(config.out_dir / "ranks.csv");
    write_ranks_csv(out, report.ranks);
  }

  // Long format, one row per (dataset, solver, level); empty cells mean the
  // level was never reached.
  auto iters = open_output(config.out_dir / "iterations.csv");
  auto secs = open_output(config.out_dir / "seconds.csv");
  iters << "dataset,solver,level,iterations\n";
  secs << "dataset,solver,level,seconds\n";
  for (const auto& run : report.runs) {
    const auto& dataset = report.dataset_labels[run.dataset];
    const auto& solver = config.solvers[run.solver].name;
    for (std::size_t l = 0; l < run.hits.size(); ++l) {
      const auto& hit = run.hits[l];
      const auto level = format_double(config.levels[l]);
      iters << dataset << ',' << solver << ',' << level << ',';
      secs << dataset << ',' << solver << ',' << level << ',';
      if (hit.iterations) {
        iters << *hit.iterations;
        secs << format_double(hit.seconds);
      } else {
        secs << "inf";
      }
      iters << '\n';
      secs << '\n';
    }
    auto trace = open_output(config.out_dir / "traces" / (dataset + "__" + solver + ".csv"));
    write_trace_csv(trace, run.result.trace);
  }
}

}  // namespace conesta
