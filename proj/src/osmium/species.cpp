#include "osmium/species.hpp"

#include <cmath>

namespace osmium {

SpeciesSystem SpeciesSystem::validate(std::vector<Species> list) {
  const int n = static_cast<int>(list.size());
  if (n == 0) fail(ErrorCode::TooFewSpecies, "empty species list");
  for (const auto& s : list) {
    if (!(s.molar_mass > 0.0))
      fail(ErrorCode::ConfigError, "species '" + s.name + "' has non-positive molar mass");
  }

  int n_charged = 0;
  for (const auto& s : list)
    if (s.charge != 0) ++n_charged;

  if (n < 3 || n_charged < 2)
    fail(ErrorCode::TooFewSpecies,
         "need n >= 3 and at least two charged species (n=" + std::to_string(n) +
             ", n_c=" + std::to_string(n_charged) + ")");

  const int n_unc = n - n_charged;
  for (int i = 0; i < n; ++i) {
    const bool should_be_uncharged = i < n_unc;
    if (should_be_uncharged && list[i].charge != 0)
      fail(ErrorCode::OrderingViolation,
           "charged species '" + list[i].name + "' appears before an uncharged one");
    if (!should_be_uncharged && list[i].charge == 0)
      fail(ErrorCode::OrderingViolation,
           "uncharged species '" + list[i].name + "' appears after a charged one");
  }
  if (list[n - 1].charge * list[n - 2].charge >= 0)
    fail(ErrorCode::OrderingViolation, "last two species must carry opposite charges");

  SpeciesSystem sys;
  sys.species_ = std::move(list);
  sys.n_charged_ = n_charged;
  return sys;
}

SpeciesSystem validate_system(const std::vector<Species>& list) {
  return SpeciesSystem::validate(list);
}

Eigen::VectorXi SpeciesSystem::charge_vector() const {
  Eigen::VectorXi z(n());
  for (int i = 0; i < n(); ++i) z[i] = species_[i].charge;
  return z;
}

double SpeciesSystem::charge_norm() const {
  long long s = 0;
  for (const auto& sp : species_) s += static_cast<long long>(sp.charge) * sp.charge;
  return std::sqrt(static_cast<double>(s));
}

Eigen::VectorXd SpeciesSystem::molar_masses() const {
  Eigen::VectorXd m(n());
  for (int i = 0; i < n(); ++i) m[i] = species_[i].molar_mass;
  return m;
}

}  // namespace osmium
