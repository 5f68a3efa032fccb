#pragma once

#include "osmium/assembly.hpp"
#include "osmium/newton.hpp"

namespace osmium {

struct ButcherTableau {
  Eigen::MatrixXd A;
  Eigen::VectorXd b, c;
  int stages = 1;
  std::string name;
};

// Stiffly accurate Radau IIA tableaux with exact rational entries.
ButcherTableau radau_iia_1();  // implicit Euler
ButcherTableau radau_iia_2();
ButcherTableau tableau_by_name(const std::string& name);

struct StepRecord {
  double time = 0.0;
  int newton_iterations = 0;
  double residual = 0.0;
  double E1 = 0.0, E2 = 0.0;
  Eigen::VectorXd moles;
  double mass = 0.0;
};

struct TransientReport {
  std::vector<StepRecord> steps;  // steps+1 records (initial state first)
  double max_E1 = 0.0, max_E2 = 0.0;
  // relative drift of each salt's total moles against the initial record
  Eigen::VectorXd moles_drift;
};

class TransientStepper {
 public:
  TransientStepper(DiscreteSystem& sys, const ButcherTableau& tableau, double dt);

  // advance one step from time t; returns the Newton report of the coupled
  // stage solve and replaces u by the end-of-step state
  NewtonReport step(Eigen::VectorXd& u, double t) const;

  // stage-system residual/Jacobian (exposed for the FD diagnostics)
  void stage_system(const Eigen::VectorXd& U, const Eigen::VectorXd& u0, double t,
                    Eigen::VectorXd& R, std::vector<Eigen::Triplet<double>>* T) const;
  void stage_system_cached(const Eigen::VectorXd& U, const Eigen::VectorXd& G0, double t,
                           Eigen::VectorXd& R, std::vector<Eigen::Triplet<double>>* T) const;
  int stage_dim() const { return tab_.stages * sys_.layout().total; }

  // one steady solve of the algebraic rows with the composition frozen
  void consistent_initialize(Eigen::VectorXd& u) const;

 private:
  DiscreteSystem& sys_;
  ButcherTableau tab_;
  double dt_;
  std::vector<char> diff_;
};

TransientReport run_transient(DiscreteSystem& sys, Eigen::VectorXd& u,
                              const TimeSettings& time, const SolverSettings& solver,
                              std::vector<NewtonReport>* newton_log = nullptr);

}  // namespace osmium
