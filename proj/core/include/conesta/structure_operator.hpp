#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "conesta/grid_mask.hpp"

namespace conesta {

// One nonzero of the operator.
struct Entry {
  std::size_t row;
  std::size_t col;
  double value;
};

// Half-open row range [begin, end) belonging to one group.
struct RowRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
};

// Sparse linear operator A whose rows are partitioned into contiguous groups
// A_g, so that the structured penalty is s(beta) = sum_g ||A_g beta||_2.
//
// Immutable after construction. The spectral norm is computed lazily once
// and shared between copies.
class StructureOperator {
 public:
  // Validates that the groups partition [0, n_rows) in order and that every
  // entry lies inside the matrix. Entries are stored sorted by (row, col).
  StructureOperator(std::size_t n_rows, std::size_t n_cols, std::vector<Entry> entries,
                    std::vector<RowRange> groups);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return n_cols_; }
  std::span<const Entry> entries() const { return entries_; }
  std::span<const RowRange> groups() const { return groups_; }
  std::size_t nonempty_group_count() const { return nonempty_groups_; }

  // A * beta.
  Eigen::VectorXd apply(const Eigen::VectorXd& beta) const;
  void apply(const Eigen::VectorXd& beta, Eigen::VectorXd& out) const;

  // A^T * alpha.
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& alpha) const;
  void apply_transpose(const Eigen::VectorXd& alpha, Eigen::VectorXd& out) const;

  // Largest singular value ||A||_2 within relative tolerance `tol`. The first
  // call computes and caches the value; later calls return the cached value.
  double spectral_norm(double tol = 1e-12) const;

  Eigen::MatrixXd to_dense() const;

 private:
  struct NormCache {
    std::mutex mutex;
    std::optional<double> value;
  };

  std::size_t n_rows_;
  std::size_t n_cols_;
  std::vector<Entry> entries_;
  std::vector<RowRange> groups_;
  std::size_t nonempty_groups_ = 0;
  std::shared_ptr<NormCache> norm_cache_;
};

// Total-variation operator on a masked grid: one group per in-mask cell, in
// parameter order, holding one row per in-mask forward neighbour along i, j
// and k (in that order). Each row computes beta_neighbour - beta_cell.
// Rows for neighbours outside the mask are removed, so boundary cells may
// own an empty group.
StructureOperator build_tv_operator(const GridMask& mask);

// Weighted (possibly overlapping) group lasso: group g contributes one row
// per member with the single nonzero weight_g at that member's column, so
// that s(beta) = sum_g weight_g * ||beta_g||_2. Indices are 0-based.
StructureOperator build_group_lasso_operator(const std::vector<std::vector<std::size_t>>& groups,
                                             std::span<const double> weights, std::size_t p);

}  // namespace conesta
