#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "osmium/ad.hpp"
#include "osmium/saltcharge.hpp"

namespace osmium {

using ad::Dual;

// Stefan-Maxwell diffusivities D_ij as functions of the transformed state.
// Argument convention for Dual evaluation: args = [x_nu(0..s-1), p], nargs = s+1.
class DiffusivityModel {
 public:
  virtual ~DiffusivityModel() = default;
  // Fill the full symmetric n x n matrix (diagonal unused, set to zero).
  virtual void eval(const std::vector<Dual>& x_nu, const Dual& p, double T,
                    std::vector<Dual>& D) const = 0;
  Eigen::MatrixXd eval_values(const Eigen::VectorXd& x_nu, double p, double T, int n) const;
};

class ConstantDiffusivity : public DiffusivityModel {
 public:
  explicit ConstantDiffusivity(Eigen::MatrixXd D) : D_(std::move(D)) {}
  void eval(const std::vector<Dual>& x_nu, const Dual& p, double T,
            std::vector<Dual>& D) const override;

 private:
  Eigen::MatrixXd D_;
};

// D_ij = D0_ij * (x_salt / x_ref)^alpha; keeps symmetry by construction.
class PowerLawDiffusivity : public DiffusivityModel {
 public:
  PowerLawDiffusivity(Eigen::MatrixXd D0, int salt_index, double x_ref, double alpha)
      : D0_(std::move(D0)), salt_index_(salt_index), x_ref_(x_ref), alpha_(alpha) {}
  void eval(const std::vector<Dual>& x_nu, const Dual& p, double T,
            std::vector<Dual>& D) const override;

 private:
  Eigen::MatrixXd D0_;
  int salt_index_;
  double x_ref_, alpha_;
};

// Onsager transport matrix of the Stefan-Maxwell closure (value-level API).
Eigen::MatrixXd assemble_M(const SpeciesSystem& system, const Eigen::MatrixXd& D,
                           const Eigen::VectorXd& c, double T);
Eigen::MatrixXd transform_M(const SaltChargeBasis& basis, const Eigen::MatrixXd& M);
// M_Z^gamma = gamma psi_Z psi_Z^T + M_Z; throws CholeskyFailure if not SPD.
Eigen::MatrixXd augment(const Eigen::MatrixXd& M_Z, const Eigen::VectorXd& psi_Z, double gamma);

// Dual-level assembly used inside the residual: M from diffusivities and
// concentrations c = cT * x (x physical), then congruence by Z.
void assemble_M_dual(const SpeciesSystem& system, const std::vector<Dual>& D,
                     const std::vector<Dual>& c, double T, std::vector<Dual>& M);
void transform_M_dual(const SaltChargeBasis& basis, const std::vector<Dual>& M,
                      std::vector<Dual>& M_Z);

// Newtonian deviatoric stress tau = 2 eta eps(v) + (zeta - 2 eta/d) (div v) I.
Eigen::MatrixXd viscous_stress(double eta, double zeta, const Eigen::MatrixXd& grad_v);

}  // namespace osmium
