#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>

#include "conesta/objective.hpp"
#include "conesta/structure_operator.hpp"

namespace conesta {

enum class CorrelationLevel { low, medium, high };

// Dispersion d_c of the off-diagonal correlation: 1, 4.5, 8.
double correlation_dispersion(CorrelationLevel level);
std::string to_string(CorrelationLevel level);
CorrelationLevel parse_correlation(const std::string& name);

// How the subgradient certificate is chosen on TV groups whose gradient
// vanishes at beta*.
enum class FlatGroupSubgradient {
  zero,     // alpha_g = 0
  uniform,  // alpha_g drawn uniformly in the unit ball
};
std::string to_string(FlatGroupSubgradient choice);
FlatGroupSubgradient parse_flat_group_subgradient(const std::string& name);

struct SimulationDesign {
  std::size_t n = 200;
  std::size_t p = 200;
  CorrelationLevel correlation = CorrelationLevel::low;
  // Fraction of exactly-zero coefficients in beta*.
  double sparsity = 0.5;
  // The residual is scaled to ||e||_2 = 1 / snr.
  double snr = 0.5;
  std::uint64_t seed = 1;
  PenaltyWeights weights{0.618, 1.0 - 0.618, 1.618};
  FlatGroupSubgradient flat_groups = FlatGroupSubgradient::uniform;

  void validate() const;
};

struct Candidate {
  Eigen::MatrixXd X0;
  Eigen::VectorXd beta_star;
  Eigen::VectorXd e;
  double rho = 0.0;  // common off-diagonal correlation
};

// Draws X0 ~ N(1, Sigma) under the constant-correlation model, beta* with
// round(sparsity * p) leading zeros followed by sorted U(0,1) values, and
// e ~ N(1, 1) rescaled to norm 1/snr.
Candidate draw_candidate(const SimulationDesign& design);

// Subgradient certificate alpha of s at beta*: A_g beta*/||A_g beta*|| on
// groups with nonzero image, and the design's flat-group choice elsewhere.
Eigen::VectorXd subgradient_certificate(const StructureOperator& op,
                                        const Eigen::VectorXd& beta_star,
                                        const SimulationDesign& design);

// Scales (and possibly negates) each column of X0 so that beta* satisfies
// the optimality conditions of the regression problem with y = X beta* - e
// and the given certificate. On zero coordinates the l1 subgradient is held
// at half of l1 in magnitude.
Eigen::MatrixXd calibrate_columns(Eigen::MatrixXd X0, const Eigen::VectorXd& beta_star,
                                  const Eigen::VectorXd& e, const PenaltyWeights& weights,
                                  const StructureOperator& op, const Eigen::VectorXd& certificate);

struct LabeledDataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::VectorXd beta_star;
  Eigen::VectorXd e;
  Eigen::VectorXd certificate;
  double f_star = 0.0;
  double kkt_residual = 0.0;
  double rho = 0.0;
  SimulationDesign design;
  std::shared_ptr<const StructureOperator> op;

  Problem problem() const;
};

// y = X beta* - e, f_star = f(beta*), KKT residual of the certificate.
LabeledDataset assemble(Eigen::MatrixXd X, Eigen::VectorXd beta_star, Eigen::VectorXd e,
                        const SimulationDesign& design,
                        std::shared_ptr<const StructureOperator> op,
                        Eigen::VectorXd certificate);

// Full pipeline on the 1D chain of length p.
LabeledDataset simulate(const SimulationDesign& design);

// Largest violation of 0 in grad g(beta*) + l1 d|beta*| + tv A^T alpha
// over coordinates, plus any violation of the certificate's own
// constraints (unit-ball membership and alignment on nonflat groups).
double verify_kkt(const LabeledDataset& dataset);

// f(beta) - f(beta*).
double error_to_optimum(const LabeledDataset& dataset, const Eigen::VectorXd& beta);

}  // namespace conesta
