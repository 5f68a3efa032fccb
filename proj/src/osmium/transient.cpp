#include "osmium/transient.hpp"

#include <cmath>

#include "osmium/errors.hpp"

namespace osmium {

ButcherTableau radau_iia_1() {
  ButcherTableau t;
  t.stages = 1;
  t.A = Eigen::MatrixXd::Constant(1, 1, 1.0);
  t.b = Eigen::VectorXd::Constant(1, 1.0);
  t.c = Eigen::VectorXd::Constant(1, 1.0);
  t.name = "radau1";
  return t;
}

ButcherTableau radau_iia_2() {
  ButcherTableau t;
  t.stages = 2;
  t.A.resize(2, 2);
  t.A << 5.0 / 12.0, -1.0 / 12.0, 3.0 / 4.0, 1.0 / 4.0;
  t.b.resize(2);
  t.b << 3.0 / 4.0, 1.0 / 4.0;
  t.c.resize(2);
  t.c << 1.0 / 3.0, 1.0;
  t.name = "radau2";
  return t;
}

ButcherTableau tableau_by_name(const std::string& name) {
  if (name == "radau1") return radau_iia_1();
  if (name == "radau2") return radau_iia_2();
  fail(ErrorCode::ConfigError, "unknown time scheme " + name);
}

TransientStepper::TransientStepper(DiscreteSystem& sys, const ButcherTableau& tableau,
                                   double dt)
    : sys_(sys), tab_(tableau), dt_(dt), diff_(sys.differential_rows()) {}

void TransientStepper::stage_system(const Eigen::VectorXd& U, const Eigen::VectorXd& u0,
                                    double t, Eigen::VectorXd& R,
                                    std::vector<Eigen::Triplet<double>>* T) const {
  Eigen::VectorXd G0;
  sys_.assemble_mass(u0, &G0, nullptr);
  stage_system_cached(U, G0, t, R, T);
}

void TransientStepper::stage_system_cached(const Eigen::VectorXd& U, const Eigen::VectorXd& G0,
                                           double t, Eigen::VectorXd& R,
                                           std::vector<Eigen::Triplet<double>>* T) const {
  const int D = sys_.layout().total;
  const int m = tab_.stages;
  R.setZero(m * D);

  std::vector<Eigen::VectorXd> rA(m), Gs(m);
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd Uj = U.segment(j * D, D);
    std::vector<Eigen::Triplet<double>> tripsA, tripsG;
    sys_.assemble(Uj, &rA[j], T ? &tripsA : nullptr);
    sys_.assemble_mass(Uj, &Gs[j], T ? &tripsG : nullptr);
    if (T) {
      for (const auto& tr : tripsA) {
        if (diff_[tr.row()]) {
          for (int g = 0; g < m; ++g)
            T->emplace_back(g * D + tr.row(), j * D + tr.col(),
                            dt_ * tab_.A(g, j) * tr.value());
        } else {
          T->emplace_back(j * D + tr.row(), j * D + tr.col(), tr.value());
        }
      }
      for (const auto& tr : tripsG)
        if (diff_[tr.row()])
          T->emplace_back(j * D + tr.row(), j * D + tr.col(), tr.value());
    }
  }
  for (int g = 0; g < m; ++g)
    for (int i = 0; i < D; ++i) {
      if (diff_[i]) {
        double acc = Gs[g][i] - G0[i];
        for (int j = 0; j < m; ++j) acc += dt_ * tab_.A(g, j) * rA[j][i];
        R[g * D + i] = acc;
      } else {
        R[g * D + i] = rA[g][i];
      }
    }
}

NewtonReport TransientStepper::step(Eigen::VectorXd& u, double t) const {
  const int D = sys_.layout().total;
  const int m = tab_.stages;
  Eigen::VectorXd U(m * D);
  for (int g = 0; g < m; ++g) U.segment(g * D, D) = u;

  Eigen::VectorXd G0;
  sys_.assemble_mass(u, &G0, nullptr);
  auto fn = [&](const Eigen::VectorXd& Uc, Eigen::VectorXd& R,
                std::vector<Eigen::Triplet<double>>* T) {
    stage_system_cached(Uc, G0, t, R, T);
  };
  NewtonReport rep = newton_solve(fn, U, sys_.scenario().solver);
  if (rep.converged) u = U.segment((m - 1) * D, D);  // stiffly accurate
  return rep;
}

void TransientStepper::consistent_initialize(Eigen::VectorXd& u) const {
  const auto& lay = sys_.layout();
  const Eigen::VectorXd u0 = u;
  std::vector<char> fixed(lay.total, 0);
  for (int l = 0; l < lay.s; ++l)
    for (int c = 0; c < lay.ndg; ++c) fixed[lay.xdof(l, c)] = 1;
  // composition-sector constraint rows become vacuous with frozen x; pin
  // their multiplier slots instead
  for (size_t ci = 0; ci < sys_.constraints().items.size(); ++ci) {
    const auto kind = sys_.constraints().items[ci].kind;
    const bool comp_sector = (kind == Constraint::Kind::Normalization && !sys_.leak_active()) ||
                             kind == Constraint::Kind::TotalMoles ||
                             kind == Constraint::Kind::TotalMass;
    if (comp_sector) fixed[lay.mdof(static_cast<int>(ci))] = 1;
  }

  auto fn = [&](const Eigen::VectorXd& uc, Eigen::VectorXd& R,
                std::vector<Eigen::Triplet<double>>* T) {
    std::vector<Eigen::Triplet<double>> raw;
    sys_.assemble(uc, &R, T ? &raw : nullptr);
    for (int i = 0; i < lay.total; ++i)
      if (fixed[i]) R[i] = uc[i] - u0[i];
    if (T) {
      for (const auto& tr : raw)
        if (!fixed[tr.row()]) T->push_back(tr);
      for (int i = 0; i < lay.total; ++i)
        if (fixed[i]) T->emplace_back(i, i, 1.0);
    }
  };
  NewtonReport rep = newton_solve(fn, u, sys_.scenario().solver);
  if (!rep.converged)
    fail(ErrorCode::NonConvergence, "consistent initialization did not converge");
}

TransientReport run_transient(DiscreteSystem& sys, Eigen::VectorXd& u,
                              const TimeSettings& time, const SolverSettings& solver,
                              std::vector<NewtonReport>* newton_log) {
  TransientReport report;
  ButcherTableau tab = tableau_by_name(time.scheme);
  TransientStepper stepper(sys, tab, time.dt);
  if (time.consistent_init) stepper.consistent_initialize(u);

  auto record = [&](double t, int iters, double res) {
    StepRecord rec;
    rec.time = t;
    rec.newton_iterations = iters;
    rec.residual = res;
    rec.E1 = sys.error_E1(u);
    rec.E2 = sys.error_E2(u);
    rec.moles = sys.salt_moles(u);
    rec.mass = sys.total_mass(u);
    report.steps.push_back(rec);
  };
  record(0.0, 0, 0.0);

  for (int k = 0; k < time.steps; ++k) {
    NewtonReport rep = stepper.step(u, k * time.dt);
    if (newton_log) newton_log->push_back(rep);
    if (!rep.converged)
      fail(ErrorCode::NonConvergence,
           "time step " + std::to_string(k + 1) + " did not converge (residual " +
               std::to_string(rep.residual_norms.back()) + ")");
    record((k + 1) * time.dt, rep.iterations, rep.residual_norms.back());
  }

  report.max_E1 = 0.0;
  report.max_E2 = 0.0;
  for (const auto& rec : report.steps) {
    report.max_E1 = std::max(report.max_E1, rec.E1);
    report.max_E2 = std::max(report.max_E2, rec.E2);
  }
  const Eigen::VectorXd m0 = report.steps.front().moles;
  report.moles_drift = Eigen::VectorXd::Zero(m0.size());
  for (const auto& rec : report.steps)
    for (int l = 0; l < m0.size(); ++l)
      report.moles_drift[l] = std::max(
          report.moles_drift[l], std::abs(rec.moles[l] - m0[l]) / std::max(1e-30, std::abs(m0[l])));
  return report;
}

}  // namespace osmium
