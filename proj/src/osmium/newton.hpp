#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "osmium/scenario.hpp"

namespace osmium {

struct NewtonReport {
  std::vector<double> residual_norms;  // per iteration, starting with the initial residual
  int iterations = 0;
  bool converged = false;
};

// F(u, r, trips): assemble the residual and (when trips != nullptr) Jacobian.
using AssembleFn =
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&,
                       std::vector<Eigen::Triplet<double>>*)>;

// Plain Newton with a sparse direct solve; on a DomainError at a trial point
// the step is halved (feasibility backtracking). Throws NonConvergence after
// max_iter and SingularLinearSystem on factorization failure.
NewtonReport newton_solve(const AssembleFn& assemble, Eigen::VectorXd& u,
                          const SolverSettings& settings);

}  // namespace osmium
