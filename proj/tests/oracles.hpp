#pragma once

// Independent reference implementations used as test oracles. They share no
// code with the library beyond plain Eigen types.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <vector>

#include "conesta/rng.hpp"

namespace oracle {

// Largest singular value from a dense SVD.
inline double dense_spectral_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()(0);
}

// TV of an image given as a flat row-major array over (d1, d2, d3) with an
// inside mask, evaluated straight from the grid definition.
inline double grid_tv(const std::vector<double>& image, const std::vector<bool>& inside,
                      std::size_t d1, std::size_t d2, std::size_t d3) {
  const auto at = [&](std::size_t i, std::size_t j, std::size_t k) { return (i * d2 + j) * d3 + k; };
  double total = 0.0;
  for (std::size_t i = 0; i < d1; ++i) {
    for (std::size_t j = 0; j < d2; ++j) {
      for (std::size_t k = 0; k < d3; ++k) {
        if (!inside[at(i, j, k)]) continue;
        const double c = image[at(i, j, k)];
        double sq = 0.0;
        if (i + 1 < d1 && inside[at(i + 1, j, k)]) sq += std::pow(image[at(i + 1, j, k)] - c, 2);
        if (j + 1 < d2 && inside[at(i, j + 1, k)]) sq += std::pow(image[at(i, j + 1, k)] - c, 2);
        if (k + 1 < d3 && inside[at(i, j, k + 1)]) sq += std::pow(image[at(i, j, k + 1)] - c, 2);
        total += std::sqrt(sq);
      }
    }
  }
  return total;
}

// 1D chain TV, sum_j |b_{j+1} - b_j|.
inline double chain_tv(const Eigen::VectorXd& b) {
  double s = 0.0;
  for (Eigen::Index j = 0; j + 1 < b.size(); ++j) s += std::abs(b[j + 1] - b[j]);
  return s;
}

// Naive elastic-net + chain-TV objective.
inline double chain_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double l1,
                              double l2, double tv, const Eigen::VectorXd& b) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double r = -y[i];
    for (Eigen::Index j = 0; j < X.cols(); ++j) r += X(i, j) * b[j];
    loss += r * r;
  }
  double ridge = 0.0, lasso = 0.0;
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    ridge += b[j] * b[j];
    lasso += std::abs(b[j]);
  }
  return 0.5 * loss + 0.5 * l2 * ridge + l1 * lasso + tv * chain_tv(b);
}

// Central finite-difference gradient.
inline Eigen::VectorXd finite_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                         const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
    xp[i] = xm[i] = x[i];
  }
  return g;
}

inline Eigen::VectorXd random_vector(conesta::Rng& rng, Eigen::Index n, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal(0.0, scale);
  return v;
}

inline Eigen::MatrixXd random_matrix(conesta::Rng& rng, Eigen::Index r, Eigen::Index c) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.normal();
  return m;
}

// Closed-form ridge minimizer (X^T X + l2 I)^{-1} X^T y.
inline Eigen::VectorXd ridge_solution(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                      double l2) {
  const Eigen::MatrixXd G =
      X.transpose() * X + l2 * Eigen::MatrixXd::Identity(X.cols(), X.cols());
  return G.ldlt().solve(X.transpose() * y);
}

// Minimizer of 1/2 (u - z)^2 + t |u| by scanning a fine grid.
inline double grid_prox_abs(double z, double t) {
  double best = 0.0, best_val = 0.5 * z * z;
  const double lo = -std::abs(z) - 1.0, hi = std::abs(z) + 1.0;
  const int steps = 200000;
  for (int s = 0; s <= steps; ++s) {
    const double u = lo + (hi - lo) * s / steps;
    const double v = 0.5 * (u - z) * (u - z) + t * std::abs(u);
    if (v < best_val) {
      best_val = v;
      best = u;
    }
  }
  return best;
}

}  // namespace oracle
