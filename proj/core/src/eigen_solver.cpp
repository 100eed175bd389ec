#include "conesta/eigen_solver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "conesta/errors.hpp"
#include "conesta/rng.hpp"

namespace conesta {

EigenEstimate largest_eigenvalue(const SymmetricApply& apply, std::size_t dim, double tol,
                                 std::uint64_t seed, std::size_t max_matvecs,
                                 std::size_t max_basis) {
  if (!(tol > 0.0)) throw InvalidArgument("largest_eigenvalue: tol must be positive");
  EigenEstimate result;
  if (dim == 0) {
    result.converged = true;
    return result;
  }
  const auto n = static_cast<Eigen::Index>(dim);
  const auto basis_cap = static_cast<Eigen::Index>(std::clamp<std::size_t>(max_basis, 2, dim));

  Rng rng(seed);
  Eigen::VectorXd start(n);
  for (Eigen::Index i = 0; i < n; ++i) start[i] = rng.uniform(-1.0, 1.0);
  start.normalize();

  Eigen::MatrixXd basis(n, basis_cap);
  Eigen::VectorXd w(n);
  Eigen::VectorXd diag(basis_cap);
  Eigen::VectorXd offdiag(basis_cap);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tridiagonal;
  double previous = -1.0;

  while (result.matvecs < max_matvecs) {
    basis.col(0) = start;
    Eigen::Index m = 0;
    Eigen::VectorXd ritz_coefficients;
    for (; m < basis_cap && result.matvecs < max_matvecs; ++m) {
      apply(basis.col(m), w);
      ++result.matvecs;
      diag[m] = basis.col(m).dot(w);
      w -= diag[m] * basis.col(m);
      if (m > 0) w -= offdiag[m - 1] * basis.col(m - 1);
      // Two passes of classical Gram-Schmidt against the whole basis.
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd coeffs = basis.leftCols(m + 1).transpose() * w;
        w -= basis.leftCols(m + 1) * coeffs;
      }
      offdiag[m] = w.norm();

      const bool invariant_now = offdiag[m] <= 1e-14 * std::max(std::abs(diag[m]), 1e-300);
      // The tridiagonal eigensolve dominates the cost for cheap operators, so
      // convergence is only tested every few steps.
      if (m % 8 != 7 && m + 1 < basis_cap && !invariant_now && result.matvecs < max_matvecs) {
        basis.col(m + 1) = w / offdiag[m];
        continue;
      }
      if (m == 0) {
        ritz_coefficients = Eigen::VectorXd::Ones(1);
        result.value = diag[0];
      } else {
        Eigen::VectorXd d = diag.head(m + 1);
        Eigen::VectorXd e = offdiag.head(m);
        tridiagonal.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
        result.value = tridiagonal.eigenvalues()[m];
        ritz_coefficients = tridiagonal.eigenvectors().col(m);
      }

      const double scale = std::max(std::abs(result.value), 1e-300);
      const double residual = offdiag[m] * std::abs(ritz_coefficients[m]);
      const bool invariant = offdiag[m] <= 1e-14 * scale;
      const bool stalled = previous >= 0.0 && std::abs(result.value - previous) < tol * scale &&
                           residual <= std::sqrt(tol) * scale;
      previous = result.value;
      if (invariant || residual <= tol * scale || stalled) {
        result.converged = true;
        return result;
      }
      if (m + 1 < basis_cap) basis.col(m + 1) = w / offdiag[m];
    }
    // Restart from the leading Ritz vector.
    const Eigen::Index used = static_cast<Eigen::Index>(ritz_coefficients.size());
    start = basis.leftCols(used) * ritz_coefficients;
    start.normalize();
  }
  return result;
}

}  // namespace conesta
