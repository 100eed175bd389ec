#include "conesta/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "conesta/errors.hpp"
#include "conesta/rng.hpp"
#include "conesta/smoothing.hpp"

namespace conesta {

double correlation_dispersion(CorrelationLevel level) {
  switch (level) {
    case CorrelationLevel::low:
      return 1.0;
    case CorrelationLevel::medium:
      return 4.5;
    case CorrelationLevel::high:
      return 8.0;
  }
  return 1.0;
}

std::string to_string(CorrelationLevel level) {
  switch (level) {
    case CorrelationLevel::low:
      return "low";
    case CorrelationLevel::medium:
      return "medium";
    case CorrelationLevel::high:
      return "high";
  }
  return "low";
}

CorrelationLevel parse_correlation(const std::string& name) {
  if (name == "low") return CorrelationLevel::low;
  if (name == "medium") return CorrelationLevel::medium;
  if (name == "high") return CorrelationLevel::high;
  throw InvalidArgument("unknown correlation level '" + name + "' (low, medium, high)");
}

std::string to_string(FlatGroupSubgradient choice) {
  return choice == FlatGroupSubgradient::zero ? "zero" : "uniform";
}

FlatGroupSubgradient parse_flat_group_subgradient(const std::string& name) {
  if (name == "zero") return FlatGroupSubgradient::zero;
  if (name == "uniform") return FlatGroupSubgradient::uniform;
  throw InvalidArgument("unknown flat-group subgradient '" + name + "' (zero, uniform)");
}

void SimulationDesign::validate() const {
  if (n < 2 || p < 2) throw InvalidArgument("simulation: n and p must be >= 2");
  if (!(sparsity >= 0.0 && sparsity < 1.0)) {
    throw InvalidArgument("simulation: sparsity must lie in [0, 1)");
  }
  if (!(snr > 0.0) || !std::isfinite(snr)) throw InvalidArgument("simulation: snr must be positive");
  weights.validate();
}

Candidate draw_candidate(const SimulationDesign& design) {
  design.validate();
  const auto n = static_cast<Eigen::Index>(design.n);
  const auto p = static_cast<Eigen::Index>(design.p);
  Candidate c;

  // Constant correlation: unit diagonal, common off-diagonal rho.
  Rng cov_rng(design.seed, streams::covariance);
  const double dispersion = correlation_dispersion(design.correlation);
  const double rho_draw = cov_rng.normal(0.0, dispersion / std::sqrt(static_cast<double>(n)));
  const double rho_lo = -1.0 / static_cast<double>(p - 1) + 1e-6;
  const double rho_hi = 0.99;
  if (!(rho_lo < rho_hi)) throw NumericalError("simulation: empty correlation clamp range");
  c.rho = std::clamp(rho_draw, rho_lo, rho_hi);

  // Rows are 1 + S z with S the symmetric square root of Sigma:
  //   S = a (I - J/p) + b J/p,  a = sqrt(1 - rho),  b = sqrt(1 - rho + rho p).
  const double a = std::sqrt(1.0 - c.rho);
  const double b = std::sqrt(1.0 - c.rho + c.rho * static_cast<double>(p));
  Rng x_rng(design.seed, streams::design_matrix);
  c.X0.resize(n, p);
  Eigen::VectorXd z(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z[j] = x_rng.normal();
    const double shift = (b - a) * z.mean();
    for (Eigen::Index j = 0; j < p; ++j) c.X0(i, j) = 1.0 + a * z[j] + shift;
  }

  // round(sparsity * p) leading zeros, then sorted U(0, 1) weights.
  const auto zeros = static_cast<Eigen::Index>(std::llround(design.sparsity * static_cast<double>(p)));
  Rng beta_rng(design.seed, streams::coefficients);
  std::vector<double> weights(static_cast<std::size_t>(p - zeros));
  for (auto& v : weights) v = beta_rng.uniform();
  std::sort(weights.begin(), weights.end());
  c.beta_star = Eigen::VectorXd::Zero(p);
  for (Eigen::Index j = zeros; j < p; ++j) c.beta_star[j] = weights[static_cast<std::size_t>(j - zeros)];

  // Residual e ~ N(1, 1) scaled to norm 1/snr; redrawn (same stream) when
  // some column is exactly orthogonal to it.
  Rng e_rng(design.seed, streams::residual);
  constexpr int kMaxRedraws = 10;
  for (int attempt = 0;; ++attempt) {
    c.e.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) c.e[i] = e_rng.normal(1.0, 1.0);
    const double norm = c.e.norm();
    if (norm > 0.0) {
      c.e *= (1.0 / design.snr) / norm;
      const Eigen::VectorXd products = c.X0.transpose() * c.e;
      if ((products.array() != 0.0).all()) break;
    }
    if (attempt == kMaxRedraws) {
      throw NumericalError("simulation: residual orthogonal to a column after 10 redraws");
    }
  }
  return c;
}

Eigen::VectorXd subgradient_certificate(const StructureOperator& op,
                                        const Eigen::VectorXd& beta_star,
                                        const SimulationDesign& design) {
  const Eigen::VectorXd image = op.apply(beta_star);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(image.size());
  Rng rng(design.seed, streams::subgradient);
  for (const auto& g : op.groups()) {
    if (g.empty()) continue;
    const auto begin = static_cast<Eigen::Index>(g.begin);
    const auto len = static_cast<Eigen::Index>(g.size());
    const double norm = image.segment(begin, len).norm();
    if (norm > 0.0) {
      alpha.segment(begin, len) = image.segment(begin, len) / norm;
    } else if (design.flat_groups == FlatGroupSubgradient::uniform) {
      // Uniform in the unit ball: normal direction, radius U^(1/d).
      Eigen::VectorXd direction(len);
      for (Eigen::Index r = 0; r < len; ++r) direction[r] = rng.normal();
      const double dir_norm = direction.norm();
      const double radius = std::pow(rng.uniform(), 1.0 / static_cast<double>(len));
      if (dir_norm > 0.0) alpha.segment(begin, len) = radius * direction / dir_norm;
    }
  }
  return alpha;
}

Eigen::MatrixXd calibrate_columns(Eigen::MatrixXd X0, const Eigen::VectorXd& beta_star,
                                  const Eigen::VectorXd& e, const PenaltyWeights& weights,
                                  const StructureOperator& op, const Eigen::VectorXd& certificate) {
  weights.validate();
  const auto p = X0.cols();
  if (beta_star.size() != p || e.size() != X0.rows() ||
      static_cast<Eigen::Index>(op.n_cols()) != p ||
      certificate.size() != static_cast<Eigen::Index>(op.n_rows())) {
    throw InvalidArgument("calibrate_columns: dimension mismatch");
  }
  const Eigen::VectorXd structured = weights.tv * op.apply_transpose(certificate);

  for (Eigen::Index j = 0; j < p; ++j) {
    double correlation = X0.col(j).dot(e);
    if (correlation == 0.0) {
      throw NumericalError("calibrate_columns: column " + std::to_string(j) +
                           " is orthogonal to the residual");
    }
    // With y = X beta* - e the loss gradient is X^T e, so column j needs
    // omega_j * (x0_j . e) = target.
    double target = 0.0;
    if (beta_star[j] != 0.0) {
      target = -(weights.l2 * beta_star[j] + weights.l1 * std::copysign(1.0, beta_star[j]) +
                 structured[j]);
    } else {
      // Place target + structured at +-l1/2, on the side that keeps |target| >= l1/2.
      const double side = -structured[j] >= 0.0 ? 1.0 : -1.0;
      target = -structured[j] + side * 0.5 * weights.l1;
    }
    const double scale = std::max({1.0, std::abs(structured[j]), std::abs(beta_star[j])});
    if (std::abs(target) <= 1e-12 * scale) {
      throw NumericalError("calibrate_columns: coordinate " + std::to_string(j) +
                           " would need a zero column; increase l1 or reduce tv");
    }
    double omega = target / correlation;
    if (omega < 0.0) {
      X0.col(j) = -X0.col(j);
      omega = -omega;
    }
    X0.col(j) *= omega;
  }
  return X0;
}

Problem LabeledDataset::problem() const { return Problem(X, y, design.weights, op); }

LabeledDataset assemble(Eigen::MatrixXd X, Eigen::VectorXd beta_star, Eigen::VectorXd e,
                        const SimulationDesign& design,
                        std::shared_ptr<const StructureOperator> op,
                        Eigen::VectorXd certificate) {
  if (!op) throw InvalidArgument("assemble: operator is null");
  if (X.cols() != beta_star.size() || X.rows() != e.size()) {
    throw InvalidArgument("assemble: dimension mismatch");
  }
  LabeledDataset d;
  d.y = X * beta_star - e;
  d.X = std::move(X);
  d.beta_star = std::move(beta_star);
  d.e = std::move(e);
  d.certificate = std::move(certificate);
  d.design = design;
  d.op = std::move(op);
  d.f_star = f_value(d.problem(), d.beta_star);
  d.kkt_residual = verify_kkt(d);
  return d;
}

LabeledDataset simulate(const SimulationDesign& design) {
  auto op = std::make_shared<const StructureOperator>(build_tv_operator(GridMask::chain(design.p)));
  Candidate candidate = draw_candidate(design);
  Eigen::VectorXd certificate = subgradient_certificate(*op, candidate.beta_star, design);
  Eigen::MatrixXd X = calibrate_columns(std::move(candidate.X0), candidate.beta_star, candidate.e,
                                        design.weights, *op, certificate);
  auto dataset = assemble(std::move(X), std::move(candidate.beta_star), std::move(candidate.e),
                          design, std::move(op), std::move(certificate));
  dataset.rho = candidate.rho;
  return dataset;
}

double verify_kkt(const LabeledDataset& dataset) {
  const auto& w = dataset.design.weights;
  const auto& op = *dataset.op;
  const auto& beta = dataset.beta_star;
  if (dataset.certificate.size() != static_cast<Eigen::Index>(op.n_rows())) {
    throw InvalidArgument("verify_kkt: certificate length mismatch");
  }

  double residual = 0.0;
  // Certificate must be a subgradient of s at beta*.
  const Eigen::VectorXd image = op.apply(beta);
  for (const auto& g : op.groups()) {
    if (g.empty()) continue;
    const auto begin = static_cast<Eigen::Index>(g.begin);
    const auto len = static_cast<Eigen::Index>(g.size());
    const auto block = dataset.certificate.segment(begin, len);
    const double norm = image.segment(begin, len).norm();
    if (norm > 0.0) {
      residual = std::max(residual, (block - image.segment(begin, len) / norm).norm());
    } else {
      residual = std::max(residual, block.norm() - 1.0);
    }
  }

  const Eigen::VectorXd sigma = dataset.X * beta - dataset.y;
  const Eigen::VectorXd grad = dataset.X.transpose() * sigma + w.l2 * beta +
                               w.tv * op.apply_transpose(dataset.certificate);
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    const double violation = beta[j] != 0.0
                                 ? std::abs(grad[j] + w.l1 * std::copysign(1.0, beta[j]))
                                 : std::max(std::abs(grad[j]) - w.l1, 0.0);
    residual = std::max(residual, violation);
  }
  return residual;
}

double error_to_optimum(const LabeledDataset& dataset, const Eigen::VectorXd& beta) {
  if (beta.size() != dataset.X.cols()) throw InvalidArgument("error_to_optimum: length mismatch");
  const auto& w = dataset.design.weights;
  const double f = 0.5 * (dataset.X * beta - dataset.y).squaredNorm() +
                   0.5 * w.l2 * beta.squaredNorm() + w.l1 * beta.lpNorm<1>() +
                   w.tv * s_value(*dataset.op, beta);
  return f - dataset.f_star;
}

}  // namespace conesta
