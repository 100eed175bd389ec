#include <algorithm>
#include <cmath>

#include "conesta/errors.hpp"
#include "conesta/smoothing.hpp"
#include "conesta/solvers.hpp"
#include "solver_detail.hpp"

namespace conesta {

ProxResult prox_structured(const StructureOperator& op, const Eigen::VectorXd& v, double t,
                           double tol, std::size_t max_iterations, Eigen::VectorXd& alpha) {
  if (static_cast<std::size_t>(v.size()) != op.n_cols()) {
    throw InvalidArgument("prox_structured: length mismatch");
  }
  if (!(t >= 0.0)) throw InvalidArgument("prox_structured: t must be nonnegative");
  if (alpha.size() != static_cast<Eigen::Index>(op.n_rows())) {
    alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(op.n_rows()));
  }

  ProxResult out;
  const double norm = op.spectral_norm();
  if (t == 0.0 || op.n_rows() == 0 || norm == 0.0) {
    out.u = v;
    out.converged = true;
    return out;
  }

  // Dual: min over alpha in the product of unit balls of 1/2||v - t A^T alpha||^2,
  // primal recovery u = v - t A^T alpha. The primal-dual gap equals
  // t * sum_g (||A_g u|| - <alpha_g, A_g u>), a sum of nonnegative terms.
  const double ascent = 1.0 / (t * norm * norm);
  Eigen::VectorXd at_alpha(v.size());
  Eigen::VectorXd a_u(static_cast<Eigen::Index>(op.n_rows()));
  for (std::size_t it = 0;; ++it) {
    op.apply_transpose(alpha, at_alpha);
    out.u = v - t * at_alpha;
    op.apply(out.u, a_u);

    double gap = 0.0;
    for (const auto& g : op.groups()) {
      if (g.empty()) continue;
      const auto b = static_cast<Eigen::Index>(g.begin);
      const auto len = static_cast<Eigen::Index>(g.size());
      gap += a_u.segment(b, len).norm() - alpha.segment(b, len).dot(a_u.segment(b, len));
    }
    out.gap = t * std::max(gap, 0.0);
    out.iterations = it;
    if (out.gap <= tol) {
      out.converged = true;
      return out;
    }
    if (it == max_iterations) return out;

    alpha += ascent * a_u;
    for (const auto& g : op.groups()) {
      if (g.empty()) continue;
      auto block =
          alpha.segment(static_cast<Eigen::Index>(g.begin), static_cast<Eigen::Index>(g.size()));
      const double block_norm = block.norm();
      if (block_norm > 1.0) block /= block_norm;
    }
  }
}

SolverResult inexact_fista(const Problem& problem, const Eigen::VectorXd& beta0,
                           const SolverConfig& config, const InexactOptions& options) {
  if (beta0.size() != problem.p()) throw InvalidArgument("inexact_fista: initial point length");
  config.validate();
  if (!(options.delta > 0.0)) throw InvalidArgument("inexact_fista: delta must be positive");

  const auto& w = problem.weights();
  const auto& op = problem.op();
  const double m = problem.m();
  const bool structured = w.tv > 0.0 && op.nonempty_group_count() > 0;
  // Smoothing used only to report a certified gap bound; mu tv M = eps / 2.
  const double gap_mu_param =
      structured ? std::max(config.eps / (2.0 * w.tv * m), kMinSmoothing) : 1.0;
  const double step = 1.0 / problem.lipschitz_g();

  SolverResult result;
  detail::TraceSink sink{&result.trace, 0, 0, detail::Clock::now(), config.wall_cap_seconds};
  const GapEvaluation initial = evaluate_gap(problem, beta0, gap_mu_param);
  sink.record(0, initial, gap_mu_param);

  double scale = gap_mu(problem, beta0, config.init_mu);
  if (!(scale > 0.0)) scale = 1.0;

  const detail::LossGradient loss(problem);
  Eigen::VectorXd previous = beta0;
  Eigen::VectorXd current = beta0;
  Eigen::VectorXd z(beta0.size());
  Eigen::VectorXd grad(beta0.size());
  Eigen::VectorXd dual = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(op.n_rows()));
  std::size_t work = 0;
  bool flagged = false;
  GapEvaluation last = initial;

  for (std::size_t it = 1;; ++it) {
    const double momentum = static_cast<double>(it - 1) / static_cast<double>(it + 2);
    z = current + momentum * (current - previous);
    loss(z, grad);
    previous.swap(current);
    current = z - step * grad;

    if (structured) {
      // Tolerance in objective units; the prox subproblem is scaled by `step`.
      const double tol = step * scale / std::pow(static_cast<double>(it), 4.0 + options.delta);
      auto prox = prox_structured(op, current, step * w.tv, tol, options.max_prox_iterations, dual);
      current = std::move(prox.u);
      work += prox.iterations;
      flagged = flagged || !prox.converged;
    }
    prox_l1_inplace(current, step * w.l1);
    ++work;

    const bool exhausted = work >= config.max_inner_total;
    const bool out_of_time = sink.out_of_time();
    if (it == 1 || it % config.gap_check_period == 0 || exhausted || out_of_time) {
      last = evaluate_gap(problem, current, gap_mu_param);
      sink.outer = it;
      sink.record(work, last, gap_mu_param, flagged);
      flagged = false;
      if (last.gap <= config.eps) {
        result.converged = true;
        break;
      }
    }
    if (exhausted || out_of_time) break;
  }

  result.beta = std::move(current);
  result.final_gap = last.gap;
  result.iterations = work;
  return result;
}

}  // namespace conesta
