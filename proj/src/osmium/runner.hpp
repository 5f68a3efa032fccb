#pragma once

#include <string>

#include "osmium/transient.hpp"

namespace osmium {

// Exit-code contract: 0 success, 2 configuration error, 3 solver
// non-convergence, 4 ill-posed setup without override.
struct RunOutcome {
  int exit_code = 0;
  std::string message;
  double E1 = 0.0, E2 = 0.0;
  NewtonReport newton;
  TransientReport transient;
};

NewtonReport solve_steady(DiscreteSystem& sys, Eigen::VectorXd& u);

// Interpolate a state between two discretizations of the same mesh (used for
// low-to-high order continuation).
Eigen::VectorXd transfer_state(const DiscreteSystem& from, const DiscreteSystem& to,
                               const Eigen::VectorXd& u_from);

RunOutcome run_steady(const Scenario& scenario, const std::string& outdir,
                      bool override_illposed = false);
RunOutcome run_transient_cmd(const Scenario& scenario, const std::string& outdir,
                             bool override_illposed = false);
RunOutcome run_convergence(const Scenario& scenario, int levels, const std::string& outdir);
RunOutcome run_check(const std::string& outdir, unsigned seed = 20240801);
RunOutcome run_appendix_a(double A, double B, const std::string& outdir);

void ensure_dir(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace osmium
