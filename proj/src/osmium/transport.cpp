#include "osmium/transport.hpp"

#include <cmath>

#include "osmium/errors.hpp"

namespace osmium {

Eigen::MatrixXd DiffusivityModel::eval_values(const Eigen::VectorXd& x_nu, double p, double T,
                                              int n) const {
  const int s = static_cast<int>(x_nu.size());
  std::vector<Dual> x(s);
  for (int i = 0; i < s; ++i) x[i] = Dual::constant(x_nu[i], 0);
  Dual pd = Dual::constant(p, 0);
  std::vector<Dual> D(n * n);
  eval(x, pd, T, D);
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = D[i * n + j].v;
  return out;
}

void ConstantDiffusivity::eval(const std::vector<Dual>& x_nu, const Dual& p, double,
                               std::vector<Dual>& D) const {
  const int n = static_cast<int>(D_.rows());
  const int na = x_nu.empty() ? p.n : x_nu[0].n;
  D.assign(n * n, Dual::constant(0.0, na));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) D[i * n + j] = Dual::constant(D_(i, j), na);
}

void PowerLawDiffusivity::eval(const std::vector<Dual>& x_nu, const Dual& p, double,
                               std::vector<Dual>& D) const {
  const int n = static_cast<int>(D0_.rows());
  const int na = x_nu.empty() ? p.n : x_nu[0].n;
  Dual f = ad::pow(x_nu[salt_index_] / x_ref_, alpha_);
  D.assign(n * n, Dual::constant(0.0, na));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) D[i * n + j] = D0_(i, j) * f;
}

Eigen::MatrixXd assemble_M(const SpeciesSystem& system, const Eigen::MatrixXd& D,
                           const Eigen::VectorXd& c, double T) {
  const int n = system.n();
  for (int i = 0; i < n; ++i)
    if (!(c[i] > 0.0)) fail(ErrorCode::NonpositiveConcentration, "c must be positive");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && !(D(i, j) > 0.0))
        fail(ErrorCode::NonpositiveDiffusivity, "D_ij must be positive");

  const double cT = c.sum();
  const double RT = PhysicalConstants::R * T;
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      M(i, k) = -RT / (D(i, k) * cT);
      diag += RT * c[k] / (D(i, k) * cT * c[i]);
    }
    M(i, i) = diag;
  }
  return M;
}

Eigen::MatrixXd transform_M(const SaltChargeBasis& basis, const Eigen::MatrixXd& M) {
  return basis.Z() * M * basis.Z().transpose();
}

Eigen::MatrixXd augment(const Eigen::MatrixXd& M_Z, const Eigen::VectorXd& psi_Z, double gamma) {
  if (!(gamma > 0.0)) fail(ErrorCode::CholeskyFailure, "augmentation requires gamma > 0");
  Eigen::MatrixXd Mg = M_Z + gamma * psi_Z * psi_Z.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(Mg);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::CholeskyFailure, "augmented transport matrix is not positive definite");
  return Mg;
}

void assemble_M_dual(const SpeciesSystem& system, const std::vector<Dual>& D,
                     const std::vector<Dual>& c, double T, std::vector<Dual>& M) {
  const int n = system.n();
  const int na = c[0].n;
  const double RT = PhysicalConstants::R * T;
  Dual cT = Dual::constant(0.0, na);
  for (int i = 0; i < n; ++i) cT = cT + c[i];
  M.assign(n * n, Dual::constant(0.0, na));
  for (int i = 0; i < n; ++i) {
    Dual diag = Dual::constant(0.0, na);
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      M[i * n + k] = -RT / (D[i * n + k] * cT);
      diag = diag + RT * c[k] / (D[i * n + k] * cT * c[i]);
    }
    M[i * n + i] = diag;
  }
}

void transform_M_dual(const SaltChargeBasis& basis, const std::vector<Dual>& M,
                      std::vector<Dual>& M_Z) {
  const int n = basis.n();
  const Eigen::MatrixXd& Z = basis.Z();
  const int na = M[0].n;
  M_Z.assign(n * n, Dual::constant(0.0, na));
  // Z M Z^T with constant Z: accumulate scalar-weighted sums.
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Dual acc = Dual::constant(0.0, na);
      for (int i = 0; i < n; ++i) {
        if (Z(a, i) == 0.0) continue;
        for (int j = 0; j < n; ++j) {
          if (Z(b, j) == 0.0) continue;
          acc = acc + (Z(a, i) * Z(b, j)) * M[i * n + j];
        }
      }
      M_Z[a * n + b] = acc;
    }
}

Eigen::MatrixXd viscous_stress(double eta, double zeta, const Eigen::MatrixXd& grad_v) {
  const int d = static_cast<int>(grad_v.rows());
  Eigen::MatrixXd eps = 0.5 * (grad_v + grad_v.transpose());
  double div_v = grad_v.trace();
  return 2.0 * eta * eps +
         (zeta - 2.0 * eta / d) * div_v * Eigen::MatrixXd::Identity(d, d);
}

}  // namespace osmium
