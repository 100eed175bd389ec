#include "conesta/structure_operator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "conesta/eigen_solver.hpp"
#include "conesta/errors.hpp"

namespace conesta {

StructureOperator::StructureOperator(std::size_t n_rows, std::size_t n_cols,
                                     std::vector<Entry> entries, std::vector<RowRange> groups)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      entries_(std::move(entries)),
      groups_(std::move(groups)),
      norm_cache_(std::make_shared<NormCache>()) {
  std::size_t next = 0;
  for (const auto& g : groups_) {
    if (g.begin != next || g.end < g.begin) {
      throw InvalidArgument("structure operator: groups must partition the rows in order");
    }
    next = g.end;
    if (!g.empty()) ++nonempty_groups_;
  }
  if (next != n_rows_) {
    throw InvalidArgument("structure operator: groups cover " + std::to_string(next) +
                          " rows, operator has " + std::to_string(n_rows_));
  }
  for (const auto& e : entries_) {
    if (e.row >= n_rows_ || e.col >= n_cols_) {
      throw InvalidArgument("structure operator: entry outside the matrix");
    }
    if (!std::isfinite(e.value)) throw InvalidArgument("structure operator: non-finite entry");
  }
  std::stable_sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
}

void StructureOperator::apply(const Eigen::VectorXd& beta, Eigen::VectorXd& out) const {
  if (static_cast<std::size_t>(beta.size()) != n_cols_) {
    throw InvalidArgument("apply: expected vector of length " + std::to_string(n_cols_) +
                          ", got " + std::to_string(beta.size()));
  }
  out.setZero(static_cast<Eigen::Index>(n_rows_));
  for (const auto& e : entries_) out[e.row] += e.value * beta[e.col];
}

Eigen::VectorXd StructureOperator::apply(const Eigen::VectorXd& beta) const {
  Eigen::VectorXd out;
  apply(beta, out);
  return out;
}

void StructureOperator::apply_transpose(const Eigen::VectorXd& alpha, Eigen::VectorXd& out) const {
  if (static_cast<std::size_t>(alpha.size()) != n_rows_) {
    throw InvalidArgument("apply_transpose: expected vector of length " +
                          std::to_string(n_rows_) + ", got " + std::to_string(alpha.size()));
  }
  out.setZero(static_cast<Eigen::Index>(n_cols_));
  for (const auto& e : entries_) out[e.col] += e.value * alpha[e.row];
}

Eigen::VectorXd StructureOperator::apply_transpose(const Eigen::VectorXd& alpha) const {
  Eigen::VectorXd out;
  apply_transpose(alpha, out);
  return out;
}

double StructureOperator::spectral_norm(double tol) const {
  if (!(tol > 0.0)) throw InvalidArgument("spectral_norm: tol must be positive");
  std::lock_guard lock(norm_cache_->mutex);
  if (norm_cache_->value) return *norm_cache_->value;

  double norm = 0.0;
  if (n_rows_ > 0 && n_cols_ > 0 && !entries_.empty()) {
    Eigen::VectorXd image(static_cast<Eigen::Index>(n_rows_));
    const auto gram = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
      apply(x, image);
      apply_transpose(image, y);
    };
    const auto estimate = largest_eigenvalue(gram, n_cols_, tol);
    norm = std::sqrt(std::max(estimate.value, 0.0));
  }
  norm_cache_->value = norm;
  return norm;
}

Eigen::MatrixXd StructureOperator::to_dense() const {
  Eigen::MatrixXd dense =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_rows_), static_cast<Eigen::Index>(n_cols_));
  for (const auto& e : entries_) dense(e.row, e.col) += e.value;
  return dense;
}

StructureOperator build_tv_operator(const GridMask& mask) {
  if (mask.size() == 0) throw InvalidArgument("build_tv_operator: mask has no in-mask cell");

  const auto& d = mask.dims();
  std::vector<Entry> entries;
  std::vector<RowRange> groups;
  entries.reserve(6 * mask.size());
  groups.reserve(mask.size());

  std::size_t row = 0;
  for (std::size_t i = 0; i < d.d1; ++i) {
    for (std::size_t j = 0; j < d.d2; ++j) {
      for (std::size_t k = 0; k < d.d3; ++k) {
        const auto centre = mask.index(i, j, k);
        if (!centre) continue;
        const std::size_t begin = row;
        for (const auto neighbour :
             {mask.index(i + 1, j, k), mask.index(i, j + 1, k), mask.index(i, j, k + 1)}) {
          if (!neighbour) continue;
          entries.push_back({row, *centre, -1.0});
          entries.push_back({row, *neighbour, 1.0});
          ++row;
        }
        groups.push_back({begin, row});
      }
    }
  }
  return StructureOperator(row, mask.size(), std::move(entries), std::move(groups));
}

StructureOperator build_group_lasso_operator(const std::vector<std::vector<std::size_t>>& groups,
                                             std::span<const double> weights, std::size_t p) {
  if (weights.size() != groups.size()) {
    throw InvalidArgument("build_group_lasso_operator: one weight per group required");
  }
  std::vector<Entry> entries;
  std::vector<RowRange> ranges;
  ranges.reserve(groups.size());
  std::size_t row = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (!(weights[g] > 0.0) || !std::isfinite(weights[g])) {
      throw InvalidArgument("build_group_lasso_operator: group weights must be positive");
    }
    const std::size_t begin = row;
    for (const auto index : groups[g]) {
      if (index >= p) {
        throw InvalidArgument("build_group_lasso_operator: index " + std::to_string(index) +
                              " out of range for p = " + std::to_string(p));
      }
      entries.push_back({row++, index, weights[g]});
    }
    ranges.push_back({begin, row});
  }
  return StructureOperator(row, p, std::move(entries), std::move(ranges));
}

}  // namespace conesta
