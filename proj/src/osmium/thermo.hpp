#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "osmium/transport.hpp"

namespace osmium {

// Volumetric equation of state. Evaluations use the Dual argument convention
// args = [x_nu(0..s-1), p]; T is a fixed parameter.
class EquationOfState {
 public:
  enum class Kind { ConstantPartialMolarVolumes, CompositionDependent, PressureCompositionDependent };
  virtual ~EquationOfState() = default;
  virtual Kind kind() const = 0;

  virtual Dual cT(const std::vector<Dual>& x_nu, const Dual& p, double T) const = 0;
  // Hand-analytic partial derivative d cT / d x_k, itself Dual-valued so that
  // the derived partial molar volumes carry exact first and second derivatives.
  virtual Dual dcT_dx(int k, const std::vector<Dual>& x_nu, const Dual& p, double T) const = 0;

  // Partial molar volumes. Default: V_k = [nuZ_k - (d_k cT - nuZ_k sum_l x_l d_l cT)/cT]/cT,
  // which satisfies V . x = 1/cT identically on normalized states.
  virtual void V_nu(const std::vector<Dual>& x_nu, const Dual& p, double T,
                    const Eigen::VectorXd& nu_Z, std::vector<Dual>& V) const;
};

class ConstantVEos : public EquationOfState {
 public:
  explicit ConstantVEos(Eigen::VectorXd V) : V_(std::move(V)) {}
  Kind kind() const override { return Kind::ConstantPartialMolarVolumes; }
  Dual cT(const std::vector<Dual>& x_nu, const Dual& p, double T) const override;
  Dual dcT_dx(int k, const std::vector<Dual>& x_nu, const Dual& p, double T) const override;
  void V_nu(const std::vector<Dual>& x_nu, const Dual& p, double T, const Eigen::VectorXd& nu_Z,
            std::vector<Dual>& V) const override;
  const Eigen::VectorXd& constants() const { return V_; }

 private:
  Eigen::VectorXd V_;  // m^3/mol, length s
};

// cT = a0 + a . x_nu (mol/m^3), the linear-in-composition family.
class LinearEos : public EquationOfState {
 public:
  LinearEos(double a0, Eigen::VectorXd a) : a0_(a0), a_(std::move(a)) {}
  Kind kind() const override { return Kind::CompositionDependent; }
  Dual cT(const std::vector<Dual>& x_nu, const Dual& p, double T) const override;
  Dual dcT_dx(int k, const std::vector<Dual>& x_nu, const Dual& p, double T) const override;

 private:
  double a0_;
  Eigen::VectorXd a_;
};

// cT = (a0 + a . x_nu) * (1 + kappa_p * p), the compressible family.
class CompressibleEos : public EquationOfState {
 public:
  CompressibleEos(double a0, Eigen::VectorXd a, double kappa_p)
      : a0_(a0), a_(std::move(a)), kappa_p_(kappa_p) {}
  Kind kind() const override { return Kind::PressureCompositionDependent; }
  Dual cT(const std::vector<Dual>& x_nu, const Dual& p, double T) const override;
  Dual dcT_dx(int k, const std::vector<Dual>& x_nu, const Dual& p, double T) const override;

 private:
  double a0_;
  Eigen::VectorXd a_;
  double kappa_p_;
};

// Thermodynamic factor matrix X_nu^0 (dimensionless, s x s).
class ThermoFactorModel {
 public:
  virtual ~ThermoFactorModel() = default;
  virtual void eval(const SaltChargeBasis& basis, const std::vector<Dual>& x_nu, const Dual& p,
                    double T, std::vector<Dual>& X) const = 0;
};

// Chain rule applied to mu_k = RT sum_j Z_kj ln x_j under electroneutrality:
// X_kl = sum_j Z_kj Z_lj / x_j with x the physical mole fractions.
class IdealThermoFactors : public ThermoFactorModel {
 public:
  void eval(const SaltChargeBasis& basis, const std::vector<Dual>& x_nu, const Dual& p, double T,
            std::vector<Dual>& X) const override;
};

class ConstantThermoFactors : public ThermoFactorModel {
 public:
  explicit ConstantThermoFactors(Eigen::MatrixXd X) : X_(std::move(X)) {}
  void eval(const SaltChargeBasis& basis, const std::vector<Dual>& x_nu, const Dual& p, double T,
            std::vector<Dual>& X) const override;

 private:
  Eigen::MatrixXd X_;
};

class ViscosityModel {
 public:
  virtual ~ViscosityModel() = default;
  virtual Dual eta(const std::vector<Dual>& x_nu, const Dual& p, double T) const = 0;
  virtual Dual zeta(const std::vector<Dual>& x_nu, const Dual& p, double T) const = 0;
};

class ConstantViscosity : public ViscosityModel {
 public:
  ConstantViscosity(double eta, double zeta) : eta_(eta), zeta_(zeta) {}
  Dual eta(const std::vector<Dual>& x_nu, const Dual& p, double) const override;
  Dual zeta(const std::vector<Dual>& x_nu, const Dual& p, double) const override;

 private:
  double eta_, zeta_;
};

// eta = sum_{a,b} C(a,b) u^a v^b with u, v the two solvent variables; set
// sqrt_ratio to mimic the sqrt(x_i/(x_i+x_j)) fitting variables.
class PolynomialViscosity : public ViscosityModel {
 public:
  PolynomialViscosity(Eigen::MatrixXd coeffs, int i1, int i2, bool sqrt_ratio, double zeta)
      : C_(std::move(coeffs)), i1_(i1), i2_(i2), sqrt_ratio_(sqrt_ratio), zeta_(zeta) {}
  Dual eta(const std::vector<Dual>& x_nu, const Dual& p, double) const override;
  Dual zeta(const std::vector<Dual>& x_nu, const Dual& p, double) const override;

 private:
  Eigen::MatrixXd C_;
  int i1_, i2_;
  bool sqrt_ratio_;
  double zeta_;
};

// Declared admissible box for material evaluation.
struct MaterialDomain {
  double x_phys_min = 1e-10;  // every physical mole fraction must exceed this
  double x_phys_max = 1.0;
};

struct MaterialModel {
  std::shared_ptr<EquationOfState> eos;
  std::shared_ptr<ThermoFactorModel> factors;
  std::shared_ptr<DiffusivityModel> diffusivities;
  std::shared_ptr<ViscosityModel> viscosity;
  MaterialDomain domain;
};

// Value-level operations.
double density(const SaltChargeBasis& basis, const EquationOfState& eos,
               const ThermodynamicState& state);
Eigen::VectorXd concentrations(const SaltChargeBasis& basis, const EquationOfState& eos,
                               const ThermodynamicState& state);
// Central-difference recovery of V_nu from cT alone (validation tool).
Eigen::VectorXd partial_molar_volumes_fd(const SaltChargeBasis& basis, const EquationOfState& eos,
                                         const ThermodynamicState& state, double step = 1e-6);
Eigen::MatrixXd ideal_thermo_factors(const SaltChargeBasis& basis, const ThermodynamicState& state);
// mu_k = RT sum_j Z_kj ln x_j + V_k p (ideal model, J/mol).
double salt_chemical_potential(const SaltChargeBasis& basis, const EquationOfState& eos,
                               const ThermodynamicState& state, int k);

// Helpers shared with the assembler.
std::vector<Dual> seed_arguments(const Eigen::VectorXd& x_nu, double p, Dual* p_out);
void physical_fractions_dual(const SaltChargeBasis& basis, const std::vector<Dual>& x_nu,
                             std::vector<Dual>& x_phys);

}  // namespace osmium
