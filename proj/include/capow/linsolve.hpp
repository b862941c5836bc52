// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/SparseCore>

namespace capow {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Triplets = std::vector<Eigen::Triplet<double, int>>;

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sparse direct LU. The symbolic analysis is kept across factorizations
/// as long as the sparsity pattern does not change.
class SparseLu {
 public:
  SparseLu();
  ~SparseLu();
  SparseLu(SparseLu&&) noexcept;
  SparseLu& operator=(SparseLu&&) noexcept;

  /// Factorize; reuses the previous symbolic analysis when `same_pattern`.
  void factorize(const SparseMatrix& a, bool same_pattern = false);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

  static const char* backend();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot solve of A x = b.
Eigen::VectorXd solve_sparse(const SparseMatrix& a, const Eigen::VectorXd& b);

}  // namespace capow
