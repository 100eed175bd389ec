#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "conesta/objective.hpp"

namespace conesta {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct SolverConfig {
  // Target precision on f(beta) - f(beta*).
  double eps = 1e-6;
  // Continuation factor in (0, 1).
  double tau = 0.5;
  std::size_t max_outer = 1000;
  // Inner iteration budget summed over all continuation steps.
  std::size_t max_inner_total = 100000;
  std::size_t max_inner_per_outer = 10000;
  // Overrides the smoothing parameter of fixed-mu runs when set.
  std::optional<double> mu_fixed;
  // Inner iterations between two duality-gap evaluations.
  std::size_t gap_check_period = 10;
  double wall_cap_seconds = kInfinity;
  // Smoothing used for the initial gap probe.
  double init_mu = 1e-8;

  void validate() const;
};

// One row of a convergence trace; only iterations where the gap was
// evaluated are recorded.
struct TraceRecord {
  std::size_t k = 0;      // cumulative inner iteration index
  std::size_t outer = 0;  // continuation step (or outer iteration for inexact FISTA)
  double f = 0.0;
  double f_mu = 0.0;
  double gap = 0.0;  // gap_nonsmooth_estimate at this iterate
  double mu = 0.0;
  double seconds = 0.0;
  bool flagged = false;  // inexact FISTA: an inner prox loop hit its budget
};

using SolverTrace = std::vector<TraceRecord>;

// Bookkeeping of one CONESTA continuation step.
struct OuterStep {
  double mu = 0.0;
  double eps_mu = 0.0;    // inner tolerance eps^i - mu^i tv M
  double eps = 0.0;       // recomputed gap_mu(beta^{i+1}) + mu^i tv M
  double eps_next = 0.0;  // tau * eps
  std::size_t inner_iterations = 0;
  bool inner_converged = false;
  int mu_halvings = 0;
};

struct SolverResult {
  Eigen::VectorXd beta;
  SolverTrace trace;
  bool converged = false;
  double final_gap = kInfinity;
  std::size_t iterations = 0;
  std::vector<OuterStep> outer_steps;
};

struct FistaBudget {
  std::size_t max_iterations = 10000;
  std::size_t gap_check_period = 10;
  double wall_cap_seconds = kInfinity;
};

// Accelerated proximal gradient on the smoothed objective f_mu with momentum
// (k-2)/(k+1) and step 1/(L_g + tv ||A||^2/mu). Stops as soon as
// gap_mu(beta^k) <= eps_mu (checked at k = 1 and then every
// gap_check_period iterations) or when the budget runs out.
SolverResult fista(const Problem& problem, const Eigen::VectorXd& beta0, double eps_mu, double mu,
                   const FistaBudget& budget = {});

// Smoothing parameter minimizing the worst-case iteration bound for target
// precision eps:
//   (-tv M ||A||^2 + sqrt((tv M ||A||^2)^2 + M L_g ||A||^2 eps)) / (M L_g).
double mu_optimal(double eps, double gamma, double m, double norm_a_sq, double lipschitz_g);

// Continuation over decreasing smoothing parameters driven by duality-gap
// estimates. Returns converged = true only when the certified bound
// f(beta) - f(beta*) <= eps holds.
SolverResult conesta(const Problem& problem, const Eigen::VectorXd& beta0,
                     const SolverConfig& config);

enum class FixedMuMode {
  chen,   // mu = eps / (2 tv M)
  large,  // mu = sqrt(eps / (2 tv M))
};

double fixed_mu_value(FixedMuMode mode, double eps, double gamma, double m);

// Single FISTA run at a fixed smoothing parameter, stopped when
// gap_nonsmooth_estimate <= eps or the budget is exhausted.
SolverResult fista_fixed_mu(const Problem& problem, const Eigen::VectorXd& beta0,
                            const SolverConfig& config, FixedMuMode mode);

struct InexactOptions {
  // Inner tolerance at outer iteration k is c / k^(4 + delta).
  double delta = 0.01;
  std::size_t max_prox_iterations = 10000;
};

// FISTA on the non-smoothed problem where the proximal operator of tv*s is
// approximated by projected gradient on its dual, followed by soft
// thresholding for the l1 term.
//
// Trace column k counts outer plus inner (dual) iterations so that iteration
// counts reflect work; column `outer` is the FISTA iteration index.
SolverResult inexact_fista(const Problem& problem, const Eigen::VectorXd& beta0,
                           const SolverConfig& config, const InexactOptions& options = {});

// Approximate prox of t*s at v: argmin_u 1/2||u - v||^2 + t s(u).
// `alpha` warm-starts and receives the final dual iterate.
struct ProxResult {
  Eigen::VectorXd u;
  double gap = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

ProxResult prox_structured(const StructureOperator& op, const Eigen::VectorXd& v, double t,
                           double tol, std::size_t max_iterations, Eigen::VectorXd& alpha);

}  // namespace conesta
