#include "osmium/newton.hpp"

#include <cmath>

#include "osmium/errors.hpp"
#include "osmium/linear_solver.hpp"

namespace osmium {

NewtonReport newton_solve(const AssembleFn& assemble, Eigen::VectorXd& u,
                          const SolverSettings& settings) {
  NewtonReport report;
  const int ndof = static_cast<int>(u.size());
  Eigen::VectorXd r(ndof), r_trial(ndof);
  std::vector<Eigen::Triplet<double>> trips;

  assemble(u, r, nullptr);
  double rnorm = r.norm();
  report.residual_norms.push_back(rnorm);

  LinearSolver solver;
  for (int it = 0; it < settings.max_iter; ++it) {
    if (rnorm <= settings.tol || !std::isfinite(rnorm)) break;
    trips.clear();
    assemble(u, r, &trips);
    Eigen::SparseMatrix<double> K(ndof, ndof);
    K.setFromTriplets(trips.begin(), trips.end());
    K.makeCompressed();
    if (!solver.factor(K))
      fail(ErrorCode::SingularLinearSystem,
           "linear factorization reports a singular system; the constraint set does not "
           "close the compatibility conditions (see analyze_constraints)");
    if (it == 0) {
      // Rank deficiency may be consistent (the residual can lie in the range
      // for compatible data), so probe the factorization with a generic
      // right-hand side: an exploding or unresolved solve flags a singular
      // system even when the Newton step itself would look fine.
      Eigen::VectorXd probe(ndof);
      unsigned state = 0x9e3779b9u;
      for (int i = 0; i < ndof; ++i) {
        state = state * 1664525u + 1013904223u;
        probe[i] = (double(state) / 4294967296.0) - 0.5;
      }
      probe /= probe.norm();
      Eigen::VectorXd y = solver.solve(probe);
      double back = (K * y - probe).norm();
      if (!y.allFinite() || back > 1e-6 || y.norm() > 1e14)
        fail(ErrorCode::SingularLinearSystem,
             "linear system is rank-deficient; the constraint set does not close the "
             "compatibility conditions (see analyze_constraints for the required set)");
    }
    Eigen::VectorXd du = solver.solve(-r);
    // defense against a spurious tiny pivot corrupting the step
    double lin_res = (K * du + r).norm();
    if (!du.allFinite() || lin_res > 1e-6 * std::max(r.norm(), 1e-300))
      fail(ErrorCode::SingularLinearSystem,
           "linear solve failed (relative residual " + std::to_string(lin_res / r.norm()) +
               "); the constraint set is likely rank-deficient (see analyze_constraints)");
    if (settings.max_update < 1e299)
      for (int i = 0; i < ndof; ++i)
        du[i] = std::clamp(du[i], -settings.max_update, settings.max_update);

    // feasibility backtracking on domain errors; optional residual backtracking
    double step = 1.0;
    bool accepted = false;
    for (int half = 0; half < 14 && !accepted; ++half) {
      Eigen::VectorXd u_trial = u + step * du;
      try {
        assemble(u_trial, r_trial, nullptr);
        double tnorm = r_trial.norm();
        if (settings.line_search && std::isfinite(rnorm) && tnorm >= rnorm &&
            step > 1.0 / 4096.0) {
          step *= 0.5;
          continue;
        }
        u = u_trial;
        rnorm = tnorm;
        accepted = true;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DomainError && e.code() != ErrorCode::NonpositiveNormalizer)
          throw;
        step *= 0.5;
      }
    }
    if (!accepted)
      fail(ErrorCode::NonConvergence, "Newton step left the material domain repeatedly");
    report.iterations = it + 1;
    report.residual_norms.push_back(rnorm);
  }

  // non-convergence is reported, not thrown: the caller keeps the best state
  // and the residual history
  report.converged = std::isfinite(rnorm) && rnorm <= settings.tol;
  return report;
}

}  // namespace osmium
