// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#include "capow/linsolve.hpp"

#include <Eigen/SparseLU>
#ifdef CAPOW_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

namespace capow {

struct SparseLu::Impl {
#ifdef CAPOW_HAVE_UMFPACK
  Eigen::UmfPackLU<SparseMatrix> lu;
#else
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
#endif
  bool analyzed = false;
};

SparseLu::SparseLu() : impl_(std::make_unique<Impl>()) {}
SparseLu::~SparseLu() = default;
SparseLu::SparseLu(SparseLu&&) noexcept = default;
SparseLu& SparseLu::operator=(SparseLu&&) noexcept = default;

const char* SparseLu::backend() {
#ifdef CAPOW_HAVE_UMFPACK
  return "umfpack";
#else
  return "eigen-sparselu";
#endif
}

void SparseLu::factorize(const SparseMatrix& a, bool same_pattern) {
  if (!same_pattern || !impl_->analyzed) {
    impl_->lu.analyzePattern(a);
    impl_->analyzed = true;
  }
  impl_->lu.factorize(a);
  if (impl_->lu.info() != Eigen::Success) {
    impl_->analyzed = false;
    throw SolverError("sparse LU factorization failed (singular or ill-posed system)");
  }
}

Eigen::VectorXd SparseLu::solve(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x = impl_->lu.solve(b);
  if (impl_->lu.info() != Eigen::Success || !x.allFinite()) {
    throw SolverError("sparse LU back-substitution failed");
  }
  return x;
}

Eigen::VectorXd solve_sparse(const SparseMatrix& a, const Eigen::VectorXd& b) {
  SparseLu lu;
  lu.factorize(a);
  return lu.solve(b);
}

}  // namespace capow
