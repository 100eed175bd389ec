#pragma once

// Internal helpers shared by the solver translation units.

#include <Eigen/Dense>

#include <chrono>
#include <cstddef>

#include "conesta/objective.hpp"
#include "conesta/solvers.hpp"

namespace conesta::detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Gradient of the least-squares loss, using the Gram matrix when p <= n.
class LossGradient {
 public:
  explicit LossGradient(const Problem& problem);

  // out = X^T (X z - y) + l2 z
  void operator()(const Eigen::VectorXd& z, Eigen::VectorXd& out) const;
  // out = (X^T X + l2 I) d, the part of the gradient that is linear in d.
  void linear_part(const Eigen::VectorXd& d, Eigen::VectorXd& out) const;

 private:
  const Problem* problem_;
  bool use_gram_ = false;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd xty_;
  mutable Eigen::VectorXd residual_;
};

// Where a solver writes its trace rows.
struct TraceSink {
  SolverTrace* trace = nullptr;
  std::size_t k_offset = 0;
  std::size_t outer = 0;
  Clock::time_point start = Clock::now();
  double wall_cap_seconds = kInfinity;

  void record(std::size_t k, const GapEvaluation& eval, double mu, bool flagged = false) const;
  bool out_of_time() const { return seconds_since(start) > wall_cap_seconds; }
};

enum class StopOn {
  gap_mu,        // smoothed-problem gap
  gap_estimate,  // gap_mu + mu tv M
};

struct FistaOutcome {
  Eigen::VectorXd beta;
  std::size_t iterations = 0;
  bool converged = false;
  bool out_of_time = false;
  GapEvaluation last;
};

FistaOutcome run_fista(const Problem& problem, const LossGradient& loss, const TraceSink& sink,
                       const Eigen::VectorXd& beta0, double mu, double threshold, StopOn stop_on,
                       std::size_t max_iterations, std::size_t check_period);

}  // namespace conesta::detail
