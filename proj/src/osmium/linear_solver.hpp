#pragma once

#include <Eigen/Sparse>
#include <memory>
#include <vector>

namespace osmium {

// Sparse direct solve for the saddle-point Newton systems. Columns of unusual
// degree (the constraint multipliers) are ordered last and the remaining
// pattern gets a nested-dissection ordering; the symbolic analysis is reused
// while the sparsity pattern stays fixed.
class LinearSolver {
 public:
  LinearSolver();
  ~LinearSolver();
  LinearSolver(const LinearSolver&) = delete;
  LinearSolver& operator=(const LinearSolver&) = delete;

  // Factor the matrix; returns false when the matrix is numerically singular.
  bool factor(const Eigen::SparseMatrix<double>& K);
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace osmium
