#pragma once

#include <Eigen/Dense>
#include <vector>

#include "osmium/species.hpp"

namespace osmium {

// Stoichiometric coefficients of the n-1 neutralizing reactions. Rows are the
// nu_i vectors: identity reactions for the uncharged species, simple-salt
// reactions (two coprime positive entries orthogonal to z) for the rest.
struct NeutralizationBasis {
  Eigen::MatrixXi nu;  // (n-1) x n
};

// The salt-charge change of basis. Z stacks the nu_i rows on top of z^T/|z|;
// concentrations/fluxes transform by Z^{-T}, potentials by Z.
class SaltChargeBasis {
 public:
  SaltChargeBasis(SpeciesSystem system, NeutralizationBasis basis);

  const SpeciesSystem& system() const { return system_; }
  const NeutralizationBasis& neutralization() const { return basis_; }
  int n() const { return system_.n(); }

  const Eigen::MatrixXd& Z() const { return Z_; }
  const Eigen::MatrixXd& Z_invT() const { return Z_invT_; }
  // Row sums of the first n-1 rows of Z; the normalization constraint reads
  // nu_Z . x_nu = 1.
  const Eigen::VectorXd& nu_Z() const { return nu_Z_; }
  double charge_norm() const { return z_norm_; }

  // w_Z = Z^{-T} w (concentration-like quantities).
  Eigen::VectorXd to_transformed(const Eigen::VectorXd& w) const;
  // w = Z^T w_Z (inverse map).
  Eigen::VectorXd from_transformed(const Eigen::VectorXd& w_Z) const;
  // psi_Z = Z m / rho.
  Eigen::VectorXd psi_Z(double rho) const;

  // Physical mole fractions from transformed ones: x = Z^T [x_nu; 0].
  Eigen::VectorXd physical_mole_fractions(const Eigen::VectorXd& x_nu) const;

  // Test hook: corrupt one entry of Z (invariant checks must then fail).
  void corrupt_for_testing(int i, int j, double delta) { Z_(i, j) += delta; }

 private:
  SpeciesSystem system_;
  NeutralizationBasis basis_;
  Eigen::MatrixXd Z_, Z_invT_;
  Eigen::VectorXd nu_Z_;
  double z_norm_ = 0.0;
};

NeutralizationBasis validate_basis(const SpeciesSystem& system, const Eigen::MatrixXi& nu);
// Canonical basis: pair each charged species i < n with species n if the signs
// oppose, otherwise with species n-1; entries |z_partner|/g and |z_i|/g.
NeutralizationBasis auto_basis(const SpeciesSystem& system);
SaltChargeBasis build_transform(const SpeciesSystem& system, const NeutralizationBasis& basis);

}  // namespace osmium
