#include "conesta/smoothing.hpp"

#include <cmath>
#include <string>

#include "conesta/errors.hpp"

namespace conesta {

namespace {

void require_mu(double mu) {
  if (!(mu >= kMinSmoothing) || !std::isfinite(mu)) {
    throw InvalidArgument("smoothing parameter must be finite and >= 1e-12, got " +
                          std::to_string(mu));
  }
}

}  // namespace

Eigen::VectorXd project_group(const Eigen::VectorXd& v) {
  const double norm = v.norm();
  if (norm <= 1.0) return v;
  return v / norm;
}

Eigen::VectorXd alpha_star_from_image(const StructureOperator& op, const Eigen::VectorXd& a_beta,
                                      double mu) {
  require_mu(mu);
  Eigen::VectorXd alpha = a_beta / mu;
  for (const auto& g : op.groups()) {
    if (g.empty()) continue;
    auto block = alpha.segment(static_cast<Eigen::Index>(g.begin),
                               static_cast<Eigen::Index>(g.size()));
    const double norm = block.norm();
    if (norm > 1.0) block /= norm;
  }
  return alpha;
}

Eigen::VectorXd alpha_star(const StructureOperator& op, const Eigen::VectorXd& beta, double mu) {
  return alpha_star_from_image(op, op.apply(beta), mu);
}

double s_value_from_image(const StructureOperator& op, const Eigen::VectorXd& a_beta) {
  double total = 0.0;
  for (const auto& g : op.groups()) {
    if (g.empty()) continue;
    total += a_beta
                 .segment(static_cast<Eigen::Index>(g.begin), static_cast<Eigen::Index>(g.size()))
                 .norm();
  }
  return total;
}

double s_value(const StructureOperator& op, const Eigen::VectorXd& beta) {
  return s_value_from_image(op, op.apply(beta));
}

double s_mu_value(const StructureOperator& op, const Eigen::VectorXd& beta, double mu) {
  const Eigen::VectorXd a_beta = op.apply(beta);
  const Eigen::VectorXd alpha = alpha_star_from_image(op, a_beta, mu);
  return alpha.dot(a_beta) - 0.5 * mu * alpha.squaredNorm();
}

Eigen::VectorXd grad_s_mu(const StructureOperator& op, const Eigen::VectorXd& beta, double mu) {
  return op.apply_transpose(alpha_star(op, beta, mu));
}

double lipschitz_step(const StructureOperator& op, double mu, double gamma, double lipschitz_g) {
  require_mu(mu);
  if (!(lipschitz_g >= 0.0)) throw InvalidArgument("lipschitz_step: L_g must be nonnegative");
  if (!(gamma >= 0.0)) throw InvalidArgument("lipschitz_step: gamma must be nonnegative");
  const double norm = op.spectral_norm();
  const double lipschitz = lipschitz_g + gamma * norm * norm / mu;
  if (!(lipschitz > 0.0)) throw InvalidArgument("lipschitz_step: total Lipschitz constant is 0");
  return 1.0 / lipschitz;
}

double m_constant(const StructureOperator& op) {
  return 0.5 * static_cast<double>(op.nonempty_group_count());
}

SmoothedPenalty::SmoothedPenalty(const StructureOperator& op, double mu)
    : op_(&op), mu_(mu), m_(m_constant(op)) {
  require_mu(mu);
}

double SmoothedPenalty::lipschitz() const {
  const double norm = op_->spectral_norm();
  return norm * norm / mu_;
}

}  // namespace conesta
