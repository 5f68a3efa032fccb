#include "osmium/saltcharge.hpp"

#include <cmath>
#include <numeric>

namespace osmium {

namespace {

long long igcd(long long a, long long b) {
  a = std::llabs(a);
  b = std::llabs(b);
  while (b != 0) {
    long long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

NeutralizationBasis validate_basis(const SpeciesSystem& system, const Eigen::MatrixXi& nu) {
  const int n = system.n();
  const int n_unc = system.n_uncharged();
  if (nu.rows() != n - 1 || nu.cols() != n)
    fail(ErrorCode::ConfigError, "neutralization basis must be (n-1) x n");

  const Eigen::VectorXi z = system.charge_vector();

  // Identity reactions for uncharged species.
  for (int i = 0; i < n_unc; ++i)
    for (int j = 0; j < n; ++j)
      if (nu(i, j) != (i == j ? 1 : 0))
        fail(ErrorCode::NotIdentityForUncharged,
             "row " + std::to_string(i) + " is not the identity reaction");

  // Simple neutral salts for the remaining rows.
  for (int i = n_unc; i < n - 1; ++i) {
    for (int j = 0; j < n_unc; ++j)
      if (nu(i, j) != 0)
        fail(ErrorCode::NotSimpleSalt,
             "row " + std::to_string(i) + " touches an uncharged species");
    std::vector<int> nz;
    for (int j = n_unc; j < n; ++j)
      if (nu(i, j) != 0) nz.push_back(j);
    if (nz.size() != 2)
      fail(ErrorCode::NotSimpleSalt,
           "row " + std::to_string(i) + " must have exactly two nonzero charged entries");
    const int a = nu(i, nz[0]), b = nu(i, nz[1]);
    if (a <= 0 || b <= 0)
      fail(ErrorCode::NotSimpleSalt, "row " + std::to_string(i) + " entries must be positive");
    if (igcd(a, b) != 1)
      fail(ErrorCode::NotSimpleSalt, "row " + std::to_string(i) + " entries are not coprime");
    long long dot = 0;
    for (int j = 0; j < n; ++j) dot += static_cast<long long>(nu(i, j)) * z[j];
    if (dot != 0) fail(ErrorCode::NotNeutral, "row " + std::to_string(i) + " is not neutral");
  }

  // Independence of the salt-forming rows.
  const int m = (n - 1) - n_unc;
  if (m > 0) {
    Eigen::MatrixXd block(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) block(i, j) = static_cast<double>(nu(n_unc + i, j));
    Eigen::FullPivLU<Eigen::MatrixXd> lu(block);
    if (lu.rank() < m)
      fail(ErrorCode::DependentReactions, "salt-forming reactions are linearly dependent");
  }

  return NeutralizationBasis{nu};
}

NeutralizationBasis auto_basis(const SpeciesSystem& system) {
  const int n = system.n();
  const int n_unc = system.n_uncharged();
  const Eigen::VectorXi z = system.charge_vector();

  Eigen::MatrixXi nu = Eigen::MatrixXi::Zero(n - 1, n);
  for (int i = 0; i < n_unc; ++i) nu(i, i) = 1;
  for (int i = n_unc; i < n - 1; ++i) {
    const int q = (static_cast<long long>(z[i]) * z[n - 1] < 0) ? n - 1 : n - 2;
    const long long g = igcd(z[i], z[q]);
    nu(i, i) = static_cast<int>(std::llabs(z[q]) / g);
    nu(i, q) = static_cast<int>(std::llabs(z[i]) / g);
  }
  return validate_basis(system, nu);
}

SaltChargeBasis::SaltChargeBasis(SpeciesSystem system, NeutralizationBasis basis)
    : system_(std::move(system)), basis_(std::move(basis)) {
  const int n = system_.n();
  z_norm_ = system_.charge_norm();
  const Eigen::VectorXi z = system_.charge_vector();

  Z_.resize(n, n);
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n; ++j) Z_(i, j) = static_cast<double>(basis_.nu(i, j));
  for (int j = 0; j < n; ++j) Z_(n - 1, j) = static_cast<double>(z[j]) / z_norm_;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(Z_);
  if (!lu.isInvertible()) fail(ErrorCode::SingularTransform, "transformation matrix is singular");
  Z_invT_ = lu.inverse().transpose();

  nu_Z_ = Z_.topRows(n - 1).rowwise().sum();
}

SaltChargeBasis build_transform(const SpeciesSystem& system, const NeutralizationBasis& basis) {
  return SaltChargeBasis(system, basis);
}

Eigen::VectorXd SaltChargeBasis::to_transformed(const Eigen::VectorXd& w) const {
  return Z_invT_ * w;
}

Eigen::VectorXd SaltChargeBasis::from_transformed(const Eigen::VectorXd& w_Z) const {
  return Z_.transpose() * w_Z;
}

Eigen::VectorXd SaltChargeBasis::psi_Z(double rho) const {
  if (!(rho > 0.0)) fail(ErrorCode::DomainError, "psi_Z requires rho > 0");
  return Z_ * system_.molar_masses() / rho;
}

Eigen::VectorXd SaltChargeBasis::physical_mole_fractions(const Eigen::VectorXd& x_nu) const {
  const int n = system_.n();
  Eigen::VectorXd x_Z = Eigen::VectorXd::Zero(n);
  x_Z.head(n - 1) = x_nu;
  return Z_.transpose() * x_Z;
}

}  // namespace osmium
