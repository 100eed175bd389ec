#include "conesta/objective.hpp"

#include <cmath>
#include <string>

#include "conesta/eigen_solver.hpp"
#include "conesta/errors.hpp"
#include "conesta/smoothing.hpp"

namespace conesta {

void PenaltyWeights::validate() const {
  if (!(l2 > 0.0) || !std::isfinite(l2)) {
    throw InvalidArgument("penalty weights: l2 must be strictly positive");
  }
  if (!(l1 >= 0.0) || !std::isfinite(l1)) {
    throw InvalidArgument("penalty weights: l1 must be nonnegative");
  }
  if (!(tv >= 0.0) || !std::isfinite(tv)) {
    throw InvalidArgument("penalty weights: tv must be nonnegative");
  }
}

Problem::Problem(Eigen::MatrixXd X, Eigen::VectorXd y, PenaltyWeights weights,
                 std::shared_ptr<const StructureOperator> op)
    : X_(std::move(X)),
      y_(std::move(y)),
      weights_(weights),
      op_(std::move(op)),
      cache_(std::make_shared<Cache>()) {
  weights_.validate();
  if (!op_) throw InvalidArgument("problem: structure operator is null");
  if (X_.rows() != y_.size()) {
    throw InvalidArgument("problem: X has " + std::to_string(X_.rows()) + " rows but y has " +
                          std::to_string(y_.size()) + " entries");
  }
  if (static_cast<Eigen::Index>(op_->n_cols()) != X_.cols()) {
    throw InvalidArgument("problem: operator has " + std::to_string(op_->n_cols()) +
                          " columns but X has " + std::to_string(X_.cols()));
  }
  if (!X_.allFinite() || !y_.allFinite()) throw InvalidArgument("problem: non-finite data");
}

double Problem::lipschitz_g(double tol) const {
  std::lock_guard lock(cache_->mutex);
  if (!cache_->lipschitz) {
    double top = 0.0;
    if (X_.size() > 0) {
      Eigen::VectorXd image(X_.rows());
      const auto gram = [&](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
        image.noalias() = X_ * x;
        out.noalias() = X_.transpose() * image;
      };
      top = largest_eigenvalue(gram, static_cast<std::size_t>(X_.cols()), tol).value;
    }
    cache_->lipschitz = top + weights_.l2;
  }
  return *cache_->lipschitz;
}

double Problem::m() const { return m_constant(*op_); }

namespace {

void require_length(const Problem& problem, const Eigen::VectorXd& beta) {
  if (beta.size() != problem.p()) {
    throw InvalidArgument("expected coefficient vector of length " + std::to_string(problem.p()) +
                          ", got " + std::to_string(beta.size()));
  }
}

}  // namespace

double g_value(const Problem& problem, const Eigen::VectorXd& beta) {
  require_length(problem, beta);
  const Eigen::VectorXd residual = problem.X() * beta - problem.y();
  return 0.5 * residual.squaredNorm() + 0.5 * problem.weights().l2 * beta.squaredNorm();
}

Eigen::VectorXd g_grad(const Problem& problem, const Eigen::VectorXd& beta) {
  require_length(problem, beta);
  const Eigen::VectorXd residual = problem.X() * beta - problem.y();
  Eigen::VectorXd grad = problem.X().transpose() * residual;
  grad += problem.weights().l2 * beta;
  return grad;
}

double f_value(const Problem& problem, const Eigen::VectorXd& beta) {
  const auto& w = problem.weights();
  double f = g_value(problem, beta) + w.l1 * beta.lpNorm<1>();
  if (w.tv > 0.0) f += w.tv * s_value(problem.op(), beta);
  return f;
}

double f_mu_value(const Problem& problem, const Eigen::VectorXd& beta, double mu) {
  const auto& w = problem.weights();
  // Validates mu even when the structured term is switched off.
  const double s_mu = s_mu_value(problem.op(), beta, mu);
  return g_value(problem, beta) + w.tv * s_mu + w.l1 * beta.lpNorm<1>();
}

void prox_l1_inplace(Eigen::VectorXd& z, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("prox_l1: threshold must be nonnegative");
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const double magnitude = std::abs(z[j]) - t;
    z[j] = magnitude > 0.0 ? std::copysign(magnitude, z[j]) : 0.0;
  }
}

Eigen::VectorXd prox_l1(const Eigen::VectorXd& z, double t) {
  Eigen::VectorXd out = z;
  prox_l1_inplace(out, t);
  return out;
}

Eigen::VectorXd dual_variable(const Problem& problem, const Eigen::VectorXd& beta) {
  require_length(problem, beta);
  return problem.X() * beta - problem.y();
}

double fenchel_l_star(const Problem& problem, const Eigen::VectorXd& z) {
  if (z.size() != problem.n()) throw InvalidArgument("fenchel_l_star: length mismatch");
  return 0.5 * z.squaredNorm() + z.dot(problem.y());
}

namespace {

double omega_star(const PenaltyWeights& w, const Eigen::VectorXd& z,
                  const Eigen::VectorXd& at_alpha, const Eigen::VectorXd& alpha, double mu) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const double excess = std::abs(z[j] - w.tv * at_alpha[j]) - w.l1;
    if (excess > 0.0) sum += excess * excess;
  }
  return sum / (2.0 * w.l2) + 0.5 * w.tv * mu * alpha.squaredNorm();
}

}  // namespace

double fenchel_omega_star(const Problem& problem, const Eigen::VectorXd& z,
                          const Eigen::VectorXd& beta, double mu) {
  require_length(problem, beta);
  if (z.size() != problem.p()) throw InvalidArgument("fenchel_omega_star: length mismatch");
  const Eigen::VectorXd alpha = alpha_star(problem.op(), beta, mu);
  const Eigen::VectorXd at_alpha = problem.op().apply_transpose(alpha);
  return omega_star(problem.weights(), z, at_alpha, alpha, mu);
}

GapEvaluation evaluate_gap(const Problem& problem, const Eigen::VectorXd& beta, double mu) {
  require_length(problem, beta);
  const auto& w = problem.weights();
  const auto& op = problem.op();

  const Eigen::VectorXd sigma = problem.X() * beta - problem.y();
  const Eigen::VectorXd a_beta = op.apply(beta);
  const Eigen::VectorXd alpha = alpha_star_from_image(op, a_beta, mu);

  const double g = 0.5 * sigma.squaredNorm() + 0.5 * w.l2 * beta.squaredNorm();
  const double l1_term = w.l1 * beta.lpNorm<1>();
  const double s = s_value_from_image(op, a_beta);
  const double s_mu = alpha.dot(a_beta) - 0.5 * mu * alpha.squaredNorm();

  GapEvaluation out;
  out.f = g + l1_term + w.tv * s;
  out.f_mu = g + w.tv * s_mu + l1_term;

  const Eigen::VectorXd z = -(problem.X().transpose() * sigma);
  const Eigen::VectorXd at_alpha = op.apply_transpose(alpha);
  const double l_star = 0.5 * sigma.squaredNorm() + sigma.dot(problem.y());
  out.gap_mu = out.f_mu + l_star + omega_star(w, z, at_alpha, alpha, mu);
  out.gap = out.gap_mu + mu * w.tv * m_constant(op);
  return out;
}

double gap_mu(const Problem& problem, const Eigen::VectorXd& beta, double mu) {
  return evaluate_gap(problem, beta, mu).gap_mu;
}

double gap_nonsmooth_estimate(const Problem& problem, const Eigen::VectorXd& beta, double mu) {
  return evaluate_gap(problem, beta, mu).gap;
}

}  // namespace conesta
