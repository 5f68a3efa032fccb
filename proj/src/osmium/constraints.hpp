#pragma once

#include <string>

#include "osmium/scenario.hpp"

namespace osmium {

struct ConstraintAnalysis {
  int k = 0;  // number of required constraints (normalization counted in)
  ConstraintSet recommended;
  bool ill_posed_warning = false;
  bool leak_active = false;
  std::string note;
};

// Counts the independent solution-dependent compatibility conditions l and
// recommends k = n+1-l constraints (steady) or the per-case transient set.
// The normalization constraint is always part of the count.
ConstraintAnalysis analyze_constraints(const SpeciesSystem& system,
                                       const std::map<std::string, BoundarySpec>& bcs,
                                       EquationOfState::Kind eos_kind, bool transient);

}  // namespace osmium
