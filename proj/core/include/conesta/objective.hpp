#pragma once

#include <Eigen/Dense>

#include <memory>
#include <mutex>
#include <optional>

#include "conesta/structure_operator.hpp"

namespace conesta {

// Penalty weights of f(beta) = 1/2||X beta - y||^2 + l2/2 ||beta||^2
//                              + l1 ||beta||_1 + tv * s(beta).
struct PenaltyWeights {
  double l1 = 0.0;
  double l2 = 1.0;
  double tv = 0.0;

  // l2 must be strictly positive (the dual conjugate divides by it);
  // l1 and tv nonnegative. Throws InvalidArgument otherwise.
  void validate() const;
};

// Regularized least-squares problem. Immutable after construction; the
// Lipschitz constant of the smooth part is computed once on demand.
class Problem {
 public:
  Problem(Eigen::MatrixXd X, Eigen::VectorXd y, PenaltyWeights weights,
          std::shared_ptr<const StructureOperator> op);

  const Eigen::MatrixXd& X() const { return X_; }
  const Eigen::VectorXd& y() const { return y_; }
  const PenaltyWeights& weights() const { return weights_; }
  const StructureOperator& op() const { return *op_; }
  std::shared_ptr<const StructureOperator> op_ptr() const { return op_; }
  Eigen::Index n() const { return X_.rows(); }
  Eigen::Index p() const { return X_.cols(); }

  // L(grad g) = lambda_max(X^T X) + l2. Cached after the first call.
  double lipschitz_g(double tol = 1e-12) const;
  // M of the attached operator.
  double m() const;

 private:
  struct Cache {
    std::mutex mutex;
    std::optional<double> lipschitz;
  };

  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  PenaltyWeights weights_;
  std::shared_ptr<const StructureOperator> op_;
  std::shared_ptr<Cache> cache_;
};

double g_value(const Problem& problem, const Eigen::VectorXd& beta);
Eigen::VectorXd g_grad(const Problem& problem, const Eigen::VectorXd& beta);

// Composite objective g + l1 ||beta||_1 + tv s(beta).
double f_value(const Problem& problem, const Eigen::VectorXd& beta);
// Smoothed objective g + tv s_mu(beta) + l1 ||beta||_1.
double f_mu_value(const Problem& problem, const Eigen::VectorXd& beta, double mu);

// Soft thresholding sign(z) max(|z| - t, 0). Throws for t < 0.
Eigen::VectorXd prox_l1(const Eigen::VectorXd& z, double t);
void prox_l1_inplace(Eigen::VectorXd& z, double t);

// sigma(beta) = X beta - y.
Eigen::VectorXd dual_variable(const Problem& problem, const Eigen::VectorXd& beta);

// l*(z) = 1/2||z||^2 + <z, y>.
double fenchel_l_star(const Problem& problem, const Eigen::VectorXd& z);

// Conjugate of the smoothed penalties linearized at alpha*_mu(beta):
//   1/(2 l2) sum_j [|z_j - tv (A^T alpha*)_j| - l1]_+^2 + tv mu/2 ||alpha*||^2.
double fenchel_omega_star(const Problem& problem, const Eigen::VectorXd& z,
                          const Eigen::VectorXd& beta, double mu);

// Everything the solvers need at one iterate, computed with a single pass of
// X and A products.
struct GapEvaluation {
  double f = 0.0;        // non-smoothed objective
  double f_mu = 0.0;     // smoothed objective
  double gap_mu = 0.0;   // duality gap of the smoothed problem
  double gap = 0.0;      // gap_mu + mu tv M, bounds f(beta) - f(beta*)
};

GapEvaluation evaluate_gap(const Problem& problem, const Eigen::VectorXd& beta, double mu);

// f_mu(beta) + l*(sigma) + Omega*_mu(-X^T sigma).
double gap_mu(const Problem& problem, const Eigen::VectorXd& beta, double mu);

// gap_mu + mu tv M: an upper bound of f(beta) - min f.
double gap_nonsmooth_estimate(const Problem& problem, const Eigen::VectorXd& beta, double mu);

}  // namespace conesta
