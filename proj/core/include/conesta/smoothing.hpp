#pragma once

#include <Eigen/Dense>

#include "conesta/structure_operator.hpp"

namespace conesta {

// Smallest smoothing parameter accepted anywhere in the library.
inline constexpr double kMinSmoothing = 1e-12;

// Euclidean projection onto the unit l2 ball: v if ||v|| <= 1, else v/||v||.
Eigen::VectorXd project_group(const Eigen::VectorXd& v);

// Dual maximizer of the smoothed penalty: each group block is
// proj(A_g beta / mu). Throws InvalidArgument when mu < kMinSmoothing.
Eigen::VectorXd alpha_star(const StructureOperator& op, const Eigen::VectorXd& beta, double mu);

// Same as alpha_star, reusing a precomputed A beta.
Eigen::VectorXd alpha_star_from_image(const StructureOperator& op, const Eigen::VectorXd& a_beta,
                                      double mu);

// Non-smoothed structured penalty s(beta) = sum_g ||A_g beta||_2.
double s_value(const StructureOperator& op, const Eigen::VectorXd& beta);
double s_value_from_image(const StructureOperator& op, const Eigen::VectorXd& a_beta);

// s_mu(beta) = <alpha*, A beta> - mu/2 ||alpha*||^2.
double s_mu_value(const StructureOperator& op, const Eigen::VectorXd& beta, double mu);

// Gradient of s_mu: A^T alpha*(beta).
Eigen::VectorXd grad_s_mu(const StructureOperator& op, const Eigen::VectorXd& beta, double mu);

// Step size 1 / (L_g + gamma ||A||^2 / mu).
double lipschitz_step(const StructureOperator& op, double mu, double gamma, double lipschitz_g);

// Dual-ball constant M = max_{alpha in K} ||alpha||^2 / 2, i.e. half the
// number of nonempty groups.
double m_constant(const StructureOperator& op);

// Bundles an operator with a fixed smoothing parameter.
class SmoothedPenalty {
 public:
  SmoothedPenalty(const StructureOperator& op, double mu);

  double mu() const { return mu_; }
  double m() const { return m_; }
  const StructureOperator& op() const { return *op_; }

  double value(const Eigen::VectorXd& beta) const { return s_mu_value(*op_, beta, mu_); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& beta) const { return grad_s_mu(*op_, beta, mu_); }
  Eigen::VectorXd alpha(const Eigen::VectorXd& beta) const { return alpha_star(*op_, beta, mu_); }
  // Lipschitz constant of the gradient, ||A||^2 / mu.
  double lipschitz() const;

 private:
  const StructureOperator* op_;
  double mu_;
  double m_;
};

}  // namespace conesta
