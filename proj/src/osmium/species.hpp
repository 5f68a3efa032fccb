#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "osmium/errors.hpp"

namespace osmium {

// Fixed physical constants, SI units.
struct PhysicalConstants {
  static constexpr double R = 8.314462618;   // gas constant, J/(mol K)
  static constexpr double F = 96485.33212;   // Faraday constant, C/mol
};

struct Species {
  std::string name;
  double molar_mass = 0.0;  // kg/mol
  int charge = 0;           // equivalent charge
};

// Ordered species list. Convention: uncharged species first, then the charged
// ones, with the last two of opposite sign.
class SpeciesSystem {
 public:
  const std::vector<Species>& species() const { return species_; }
  int n() const { return static_cast<int>(species_.size()); }
  int n_charged() const { return n_charged_; }
  int n_uncharged() const { return n() - n_charged_; }

  const Species& operator[](int i) const { return species_[i]; }

  Eigen::VectorXi charge_vector() const;
  double charge_norm() const;  // sqrt(z^T z), exact integer sum under the root
  Eigen::VectorXd molar_masses() const;

  static SpeciesSystem validate(std::vector<Species> list);

 private:
  SpeciesSystem() = default;
  std::vector<Species> species_;
  int n_charged_ = 0;
};

// State in the transformed composition variables. x_nu has length n-1.
struct ThermodynamicState {
  double T = 298.15;  // K
  double p = 0.0;     // Pa
  Eigen::VectorXd x_nu;
};

SpeciesSystem validate_system(const std::vector<Species>& list);

}  // namespace osmium
