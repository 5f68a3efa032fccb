#include "osmium/constraints.hpp"

#include <cmath>
#include <limits>

#include "osmium/errors.hpp"

namespace osmium {

ConstraintAnalysis analyze_constraints(const SpeciesSystem& system,
                                       const std::map<std::string, BoundarySpec>& bcs,
                                       EquationOfState::Kind eos_kind, bool transient) {
  const int n = system.n();
  const int s = n - 1;

  // classify the n compatibility slots (s salts + current)
  bool current_solution_dependent = false;  // g_J depends on any unknowns
  bool current_phi_dependent = false;       // g_J references Phi_Z
  std::vector<bool> salt_proportional(s, false);
  std::vector<bool> salt_leak(s, false);
  std::vector<bool> salt_weak_dirichlet(s, false);
  for (const auto& [tag, spec] : bcs) {
    switch (spec.current.kind) {
      case CurrentBC::Kind::LinearButlerVolmer:
      case CurrentBC::Kind::TanhButlerVolmer:
        current_solution_dependent = true;
        current_phi_dependent = true;
        break;
      case CurrentBC::Kind::WeakDirichlet:
        current_solution_dependent = true;
        break;
      default:
        break;
    }
    if (spec.current.kind == CurrentBC::Kind::WeakDirichlet && spec.current.salt >= 0)
      salt_weak_dirichlet[spec.current.salt] = true;
    for (int i = 0; i < s; ++i) {
      if (spec.salts[i].kind == SaltFluxBC::Kind::Leak) salt_leak[i] = true;
      if (spec.salts[i].kind == SaltFluxBC::Kind::ProportionalToCurrent)
        salt_proportional[i] = true;
    }
  }

  // independent solution-dependent compatibility conditions
  int l = 0;
  if (current_solution_dependent) ++l;
  int n_wd = 0;
  for (int i = 0; i < s; ++i) {
    if (salt_leak[i]) ++l;  // the leak amplitude absorbs this condition
    else if (salt_weak_dirichlet[i]) {
      ++l;  // free normal trace: an honest equation
      ++n_wd;
    }
    // proportional-to-current salts ride on the current condition: not independent
  }

  ConstraintAnalysis out;
  out.leak_active = false;
  for (int i = 0; i < s; ++i) out.leak_active = out.leak_active || salt_leak[i];

  auto add = [&](Constraint::Kind k, double value = 0.0, int salt = 0) {
    Constraint c;
    c.kind = k;
    // abundance targets are filled from the initial state before solving
    c.value = (k == Constraint::Kind::TotalMoles || k == Constraint::Kind::TotalMass)
                  ? std::numeric_limits<double>::quiet_NaN()
                  : value;
    c.salt = salt;
    out.recommended.items.push_back(c);
  };

  if (!transient) {
    add(Constraint::Kind::Normalization);
    add(Constraint::Kind::MeanPressure);
    if (!current_phi_dependent) add(Constraint::Kind::MeanPotential);
    // abundance constraints: the normalization row pins one composition
    // direction, each weak-Dirichlet pin removes another
    int moles_needed = std::max(0, s - 1 - n_wd);
    for (int i = 0; i < s && moles_needed > 0; ++i) {
      if (salt_leak[i] || salt_weak_dirichlet[i] || salt_proportional[i]) continue;
      add(Constraint::Kind::TotalMoles, 0.0, i);
      --moles_needed;
    }
    for (int i = 0; i < s && moles_needed > 0; ++i) {
      if (salt_leak[i] || salt_weak_dirichlet[i] || !salt_proportional[i]) continue;
      add(Constraint::Kind::TotalMoles, 0.0, i);
      --moles_needed;
    }
    out.k = static_cast<int>(out.recommended.items.size());
    const int k_formula = n + 1 - l;
    if (out.k != k_formula)
      out.note = "constraint count " + std::to_string(out.k) +
                 " differs from n+1-l = " + std::to_string(k_formula) +
                 " (potential sector bookkeeping); the recommended set is used";
  } else {
    add(Constraint::Kind::Normalization);
    switch (eos_kind) {
      case EquationOfState::Kind::ConstantPartialMolarVolumes:
        add(Constraint::Kind::MeanPressure);
        break;
      case EquationOfState::Kind::CompositionDependent:
        add(Constraint::Kind::MeanPressure);
        if (!out.leak_active) {
          out.ill_posed_warning = true;
          out.note =
              "composition-dependent partial molar volumes with confined boundary conditions: "
              "the total-mole conservation conditions may be unsatisfiable";
        }
        break;
      case EquationOfState::Kind::PressureCompositionDependent:
        // pressure-dependent volumes make all mole conditions satisfiable;
        // only the normalization constraint is needed in this sector
        break;
    }
    if (!current_phi_dependent) add(Constraint::Kind::MeanPotential);
    out.k = static_cast<int>(out.recommended.items.size());
  }
  return out;
}

}  // namespace osmium
