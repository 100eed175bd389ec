#include "conesta/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "conesta/errors.hpp"
#include "conesta/smoothing.hpp"
#include "solver_detail.hpp"

namespace conesta {

void SolverConfig::validate() const {
  if (!(eps > 0.0)) throw InvalidArgument("solver config: eps must be positive");
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("solver config: tau must lie in (0, 1)");
  if (gap_check_period == 0) throw InvalidArgument("solver config: gap_check_period must be >= 1");
  if (max_inner_total == 0 || max_inner_per_outer == 0 || max_outer == 0) {
    throw InvalidArgument("solver config: iteration budgets must be positive");
  }
  if (mu_fixed && !(*mu_fixed >= kMinSmoothing)) {
    throw InvalidArgument("solver config: mu_fixed must be >= 1e-12");
  }
  if (!(init_mu >= kMinSmoothing)) throw InvalidArgument("solver config: init_mu must be >= 1e-12");
}

namespace detail {

LossGradient::LossGradient(const Problem& problem) : problem_(&problem) {
  use_gram_ = problem.p() <= problem.n();
  if (use_gram_) {
    gram_.noalias() = problem.X().transpose() * problem.X();
    xty_.noalias() = problem.X().transpose() * problem.y();
  }
  residual_.resize(problem.n());
}

void LossGradient::operator()(const Eigen::VectorXd& z, Eigen::VectorXd& out) const {
  if (use_gram_) {
    out.noalias() = gram_ * z;
    out -= xty_;
  } else {
    residual_.noalias() = problem_->X() * z;
    residual_ -= problem_->y();
    out.noalias() = problem_->X().transpose() * residual_;
  }
  out += problem_->weights().l2 * z;
}

void LossGradient::linear_part(const Eigen::VectorXd& d, Eigen::VectorXd& out) const {
  if (use_gram_) {
    out.noalias() = gram_ * d;
  } else {
    residual_.noalias() = problem_->X() * d;
    out.noalias() = problem_->X().transpose() * residual_;
  }
  out += problem_->weights().l2 * d;
}

void TraceSink::record(std::size_t k, const GapEvaluation& eval, double mu, bool flagged) const {
  if (trace == nullptr) return;
  trace->push_back(TraceRecord{k, outer, eval.f, eval.f_mu, eval.gap, mu, seconds_since(start),
                               flagged});
}

FistaOutcome run_fista(const Problem& problem, const LossGradient& loss, const TraceSink& sink,
                       const Eigen::VectorXd& beta0, double mu, double threshold, StopOn stop_on,
                       std::size_t max_iterations, std::size_t check_period) {
  const auto& w = problem.weights();
  const auto& op = problem.op();
  const bool smoothed = w.tv > 0.0 && op.n_rows() > 0;
  const double step = lipschitz_step(op, mu, smoothed ? w.tv : 0.0, problem.lipschitz_g());
  const double threshold_l1 = step * w.l1;

  // Iterates are kept as offsets from beta0. At small mu the step is tiny and
  // the updates would otherwise drop below the rounding unit of beta itself.
  Eigen::VectorXd grad_at_anchor(beta0.size());
  loss(beta0, grad_at_anchor);
  Eigen::VectorXd a_anchor;
  if (smoothed) a_anchor = op.apply(beta0);

  FistaOutcome out;
  Eigen::VectorXd previous = Eigen::VectorXd::Zero(beta0.size());
  Eigen::VectorXd current = previous;
  Eigen::VectorXd z(beta0.size());
  Eigen::VectorXd grad(beta0.size());
  Eigen::VectorXd a_z(static_cast<Eigen::Index>(op.n_rows()));
  Eigen::VectorXd structured(beta0.size());
  Eigen::VectorXd beta(beta0.size());

  for (std::size_t it = 1; it <= max_iterations; ++it) {
    // Iteration `it` is k = it + 1 of the classical statement: weight (k-2)/(k+1).
    const double momentum = static_cast<double>(it - 1) / static_cast<double>(it + 2);
    z = current + momentum * (current - previous);

    loss.linear_part(z, grad);
    grad += grad_at_anchor;
    if (smoothed) {
      op.apply(z, a_z);
      a_z += a_anchor;
      op.apply_transpose(alpha_star_from_image(op, a_z, mu), structured);
      grad += w.tv * structured;
    }
    previous.swap(current);
    current = z - step * grad;
    // Soft thresholding of beta0 + current, written for the offset.
    for (Eigen::Index j = 0; j < current.size(); ++j) {
      const double full = beta0[j] + current[j];
      current[j] = std::abs(full) <= threshold_l1 ? -beta0[j]
                                                  : current[j] - std::copysign(threshold_l1, full);
    }
    out.iterations = it;

    const bool last = it == max_iterations || sink.out_of_time();
    if (it == 1 || it % check_period == 0 || last) {
      beta = beta0 + current;
      out.last = evaluate_gap(problem, beta, mu);
      sink.record(sink.k_offset + it, out.last, mu);
      const double criterion = stop_on == StopOn::gap_mu ? out.last.gap_mu : out.last.gap;
      if (criterion <= threshold) {
        out.converged = true;
        break;
      }
    }
    if (sink.out_of_time()) {
      out.out_of_time = true;
      break;
    }
  }
  out.beta = beta0 + current;
  return out;
}

}  // namespace detail

namespace {

void require_start(const Problem& problem, const Eigen::VectorXd& beta0) {
  if (beta0.size() != problem.p()) {
    throw InvalidArgument("initial point has length " + std::to_string(beta0.size()) +
                          ", expected " + std::to_string(problem.p()));
  }
}

bool is_structureless(const Problem& problem) {
  return problem.weights().tv == 0.0 || problem.op().nonempty_group_count() == 0 ||
         problem.op().spectral_norm() == 0.0;
}

}  // namespace

SolverResult fista(const Problem& problem, const Eigen::VectorXd& beta0, double eps_mu, double mu,
                   const FistaBudget& budget) {
  require_start(problem, beta0);
  if (!(eps_mu > 0.0)) throw InvalidArgument("fista: eps_mu must be positive");
  if (!(mu >= kMinSmoothing)) throw InvalidArgument("fista: mu must be >= 1e-12");
  if (budget.max_iterations == 0 || budget.gap_check_period == 0) {
    throw InvalidArgument("fista: budget must allow at least one iteration");
  }

  SolverResult result;
  detail::TraceSink sink{&result.trace, 0, 0, detail::Clock::now(), budget.wall_cap_seconds};
  sink.record(0, evaluate_gap(problem, beta0, mu), mu);

  const detail::LossGradient loss(problem);
  auto run = detail::run_fista(problem, loss, sink, beta0, mu, eps_mu, detail::StopOn::gap_mu,
                               budget.max_iterations, budget.gap_check_period);
  result.beta = std::move(run.beta);
  result.converged = run.converged;
  result.final_gap = run.last.gap_mu;
  result.iterations = run.iterations;
  return result;
}

double mu_optimal(double eps, double gamma, double m, double norm_a_sq, double lipschitz_g) {
  if (!(eps > 0.0)) throw InvalidArgument("mu_optimal: eps must be positive");
  if (!(m > 0.0) || !(norm_a_sq > 0.0)) {
    throw InvalidArgument("mu_optimal: structureless penalty (M = 0 or ||A|| = 0)");
  }
  if (!(lipschitz_g > 0.0)) throw InvalidArgument("mu_optimal: L_g must be positive");
  if (!(gamma >= 0.0)) throw InvalidArgument("mu_optimal: gamma must be nonnegative");
  const double a = gamma * m * norm_a_sq;
  const double b = m * lipschitz_g;
  const double c = b * norm_a_sq * eps;
  // (-a + sqrt(a^2 + c)) / b, written without cancellation.
  return c / (b * (a + std::sqrt(a * a + c)));
}

SolverResult conesta(const Problem& problem, const Eigen::VectorXd& beta0,
                     const SolverConfig& config) {
  require_start(problem, beta0);
  config.validate();

  SolverResult result;
  detail::TraceSink sink{&result.trace, 0, 0, detail::Clock::now(), config.wall_cap_seconds};
  const detail::LossGradient loss(problem);
  const double gamma = problem.weights().tv;
  const double m = problem.m();

  const GapEvaluation initial = evaluate_gap(problem, beta0, config.init_mu);
  sink.record(0, initial, config.init_mu);

  if (is_structureless(problem)) {
    // Nothing to smooth: one exact accelerated proximal gradient run.
    constexpr double unused_mu = 1.0;
    auto run = detail::run_fista(problem, loss, sink, beta0, unused_mu, config.eps,
                                 detail::StopOn::gap_estimate, config.max_inner_total,
                                 config.gap_check_period);
    result.outer_steps.push_back({unused_mu, config.eps, run.last.gap, config.tau * run.last.gap,
                                  run.iterations, run.converged, 0});
    result.beta = std::move(run.beta);
    result.converged = run.converged;
    result.final_gap = run.last.gap;
    result.iterations = run.iterations;
    return result;
  }

  const double norm_a = problem.op().spectral_norm();
  const double norm_a_sq = norm_a * norm_a;
  const double lipschitz_g = problem.lipschitz_g();
  const auto mu_for = [&](double eps) {
    return std::max(mu_optimal(eps, gamma, m, norm_a_sq, lipschitz_g), kMinSmoothing);
  };

  Eigen::VectorXd beta = beta0;
  double eps_i = config.tau * initial.gap_mu;
  if (!(eps_i > 0.0)) eps_i = config.eps;
  double mu = mu_for(eps_i);
  std::size_t used = 0;

  for (std::size_t outer = 0; outer < config.max_outer; ++outer) {
    OuterStep step;
    double eps_mu = eps_i - mu * gamma * m;
    if (eps_mu <= 0.0) {
      while (eps_mu < 0.1 * eps_i) {
        mu *= 0.5;
        ++step.mu_halvings;
        if (mu < kMinSmoothing) {
          throw NumericalError("conesta: target precision below what the smoothing floor allows");
        }
        eps_mu = eps_i - mu * gamma * m;
      }
    }
    step.mu = mu;
    step.eps_mu = eps_mu;

    sink.outer = outer;
    sink.k_offset = used;
    const std::size_t allowance =
        std::min(config.max_inner_per_outer, config.max_inner_total - used);
    auto run = detail::run_fista(problem, loss, sink, beta, mu, eps_mu, detail::StopOn::gap_mu,
                                 allowance, config.gap_check_period);
    used += run.iterations;
    beta = std::move(run.beta);

    // run.last was evaluated at the returned iterate with this mu.
    eps_i = run.last.gap_mu + mu * gamma * m;
    step.eps = eps_i;
    step.eps_next = config.tau * eps_i;
    step.inner_iterations = run.iterations;
    step.inner_converged = run.converged;
    result.outer_steps.push_back(step);
    result.final_gap = eps_i;

    if (eps_i <= config.eps) {
      result.converged = true;
      break;
    }
    if (used >= config.max_inner_total || run.out_of_time) break;

    eps_i = step.eps_next;
    mu = std::min(mu_for(eps_i), mu);
  }

  result.beta = std::move(beta);
  result.iterations = used;
  return result;
}

double fixed_mu_value(FixedMuMode mode, double eps, double gamma, double m) {
  if (!(eps > 0.0)) throw InvalidArgument("fixed_mu_value: eps must be positive");
  if (!(gamma > 0.0) || !(m > 0.0)) {
    throw InvalidArgument("fixed_mu_value: requires tv > 0 and M > 0");
  }
  const double chen = eps / (2.0 * gamma * m);
  return mode == FixedMuMode::chen ? chen : std::sqrt(chen);
}

SolverResult fista_fixed_mu(const Problem& problem, const Eigen::VectorXd& beta0,
                            const SolverConfig& config, FixedMuMode mode) {
  require_start(problem, beta0);
  config.validate();

  double mu = 1.0;
  if (config.mu_fixed) {
    mu = *config.mu_fixed;
  } else if (!is_structureless(problem)) {
    mu = std::max(fixed_mu_value(mode, config.eps, problem.weights().tv, problem.m()),
                  kMinSmoothing);
  }

  SolverResult result;
  detail::TraceSink sink{&result.trace, 0, 0, detail::Clock::now(), config.wall_cap_seconds};
  sink.record(0, evaluate_gap(problem, beta0, mu), mu);
  const detail::LossGradient loss(problem);
  auto run = detail::run_fista(problem, loss, sink, beta0, mu, config.eps,
                               detail::StopOn::gap_estimate, config.max_inner_total,
                               config.gap_check_period);
  result.beta = std::move(run.beta);
  result.converged = run.converged;
  result.final_gap = run.last.gap;
  result.iterations = run.iterations;
  return result;
}

}  // namespace conesta
