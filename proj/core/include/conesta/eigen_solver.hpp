#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>

namespace conesta {

// y = M x for a symmetric positive semidefinite M.
using SymmetricApply = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& y)>;

struct EigenEstimate {
  double value = 0.0;
  std::size_t matvecs = 0;
  bool converged = false;
};

// Largest eigenvalue of a symmetric PSD operator by Lanczos iteration with
// full reorthogonalization, restarted from the leading Ritz vector when the
// Krylov basis reaches `max_basis`. The start vector is drawn from a fixed
// seed so results are reproducible. Converged when successive leading Ritz
// values differ by less than tol * value.
EigenEstimate largest_eigenvalue(const SymmetricApply& apply, std::size_t dim, double tol,
                                 std::uint64_t seed = 0x5eed, std::size_t max_matvecs = 10000,
                                 std::size_t max_basis = 256);

}  // namespace conesta
