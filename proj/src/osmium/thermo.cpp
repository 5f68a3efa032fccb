#include "osmium/thermo.hpp"

#include <cmath>

#include "osmium/errors.hpp"

namespace osmium {

void EquationOfState::V_nu(const std::vector<Dual>& x_nu, const Dual& p, double T,
                           const Eigen::VectorXd& nu_Z, std::vector<Dual>& V) const {
  const int s = static_cast<int>(x_nu.size());
  const int na = x_nu.empty() ? p.n : x_nu[0].n;
  Dual ct = cT(x_nu, p, T);
  Dual xdot = Dual::constant(0.0, na);  // sum_l x_l d_l cT
  std::vector<Dual> dct(s);
  for (int l = 0; l < s; ++l) {
    dct[l] = dcT_dx(l, x_nu, p, T);
    xdot = xdot + x_nu[l] * dct[l];
  }
  V.resize(s);
  for (int k = 0; k < s; ++k)
    V[k] = (nu_Z[k] - (dct[k] - nu_Z[k] * xdot) / ct) / ct;
}

Dual ConstantVEos::cT(const std::vector<Dual>& x_nu, const Dual& p, double) const {
  const int na = x_nu.empty() ? p.n : x_nu[0].n;
  Dual vx = Dual::constant(0.0, na);
  for (size_t k = 0; k < x_nu.size(); ++k) vx = vx + V_[k] * x_nu[k];
  return ad::inv(vx);
}

Dual ConstantVEos::dcT_dx(int k, const std::vector<Dual>& x_nu, const Dual& p, double T) const {
  Dual ct = cT(x_nu, p, T);
  return -V_[k] * ct * ct;
}

void ConstantVEos::V_nu(const std::vector<Dual>& x_nu, const Dual& p, double,
                        const Eigen::VectorXd&, std::vector<Dual>& V) const {
  const int na = x_nu.empty() ? p.n : x_nu[0].n;
  V.resize(V_.size());
  for (int k = 0; k < V_.size(); ++k) V[k] = Dual::constant(V_[k], na);
}

Dual LinearEos::cT(const std::vector<Dual>& x_nu, const Dual& p, double) const {
  const int na = x_nu.empty() ? p.n : x_nu[0].n;
  Dual r = Dual::constant(a0_, na);
  for (size_t k = 0; k < x_nu.size(); ++k) r = r + a_[k] * x_nu[k];
  return r;
}

Dual LinearEos::dcT_dx(int k, const std::vector<Dual>& x_nu, const Dual& p, double) const {
  const int na = x_nu.empty() ? p.n : x_nu[0].n;
  return Dual::constant(a_[k], na);
}

Dual CompressibleEos::cT(const std::vector<Dual>& x_nu, const Dual& p, double) const {
  const int na = x_nu.empty() ? p.n : x_nu[0].n;
  Dual base = Dual::constant(a0_, na);
  for (size_t k = 0; k < x_nu.size(); ++k) base = base + a_[k] * x_nu[k];
  return base * (1.0 + kappa_p_ * p);
}

Dual CompressibleEos::dcT_dx(int k, const std::vector<Dual>& x_nu, const Dual& p, double) const {
  return a_[k] * (1.0 + kappa_p_ * p);
}

void IdealThermoFactors::eval(const SaltChargeBasis& basis, const std::vector<Dual>& x_nu,
                              const Dual& p, double, std::vector<Dual>& X) const {
  const int n = basis.n();
  const int s = n - 1;
  const int na = x_nu.empty() ? p.n : x_nu[0].n;
  std::vector<Dual> x_phys;
  physical_fractions_dual(basis, x_nu, x_phys);
  for (int j = 0; j < n; ++j)
    if (!(x_phys[j].v > 0.0))
      fail(ErrorCode::DomainError, "ideal thermodynamic factors need x_j > 0");
  const Eigen::MatrixXd& Z = basis.Z();
  X.assign(s * s, Dual::constant(0.0, na));
  std::vector<Dual> invx(n);
  for (int j = 0; j < n; ++j) invx[j] = ad::inv(x_phys[j]);
  for (int k = 0; k < s; ++k)
    for (int l = 0; l < s; ++l) {
      Dual acc = Dual::constant(0.0, na);
      for (int j = 0; j < n; ++j) {
        const double w = Z(k, j) * Z(l, j);
        if (w != 0.0) acc = acc + w * invx[j];
      }
      X[k * s + l] = acc;
    }
}

void ConstantThermoFactors::eval(const SaltChargeBasis& basis, const std::vector<Dual>& x_nu,
                                 const Dual& p, double, std::vector<Dual>& X) const {
  const int s = basis.n() - 1;
  const int na = x_nu.empty() ? p.n : x_nu[0].n;
  X.assign(s * s, Dual::constant(0.0, na));
  for (int k = 0; k < s; ++k)
    for (int l = 0; l < s; ++l) X[k * s + l] = Dual::constant(X_(k, l), na);
}

Dual ConstantViscosity::eta(const std::vector<Dual>& x_nu, const Dual& p, double) const {
  const int na = x_nu.empty() ? p.n : x_nu[0].n;
  return Dual::constant(eta_, na);
}

Dual ConstantViscosity::zeta(const std::vector<Dual>& x_nu, const Dual& p, double) const {
  const int na = x_nu.empty() ? p.n : x_nu[0].n;
  return Dual::constant(zeta_, na);
}

Dual PolynomialViscosity::eta(const std::vector<Dual>& x_nu, const Dual& p, double) const {
  Dual u = x_nu[i1_], v = x_nu[i2_];
  if (sqrt_ratio_) {
    Dual tot = x_nu[i1_] + x_nu[i2_];
    u = ad::sqrt(x_nu[i1_] / tot);
    v = ad::sqrt(x_nu[i2_] / tot);
  }
  const int na = u.n;
  Dual r = Dual::constant(0.0, na);
  Dual ua = Dual::constant(1.0, na);
  for (int a = 0; a < C_.rows(); ++a) {
    Dual vb = Dual::constant(1.0, na);
    for (int b = 0; b < C_.cols(); ++b) {
      if (C_(a, b) != 0.0) r = r + C_(a, b) * ua * vb;
      vb = vb * v;
    }
    ua = ua * u;
  }
  return r;
}

Dual PolynomialViscosity::zeta(const std::vector<Dual>& x_nu, const Dual& p, double) const {
  const int na = x_nu.empty() ? p.n : x_nu[0].n;
  return Dual::constant(zeta_, na);
}

std::vector<Dual> seed_arguments(const Eigen::VectorXd& x_nu, double p, Dual* p_out) {
  const int s = static_cast<int>(x_nu.size());
  const int na = s + 1;
  std::vector<Dual> x(s);
  for (int i = 0; i < s; ++i) x[i] = Dual::variable(x_nu[i], i, na);
  if (p_out) *p_out = Dual::variable(p, s, na);
  return x;
}

void physical_fractions_dual(const SaltChargeBasis& basis, const std::vector<Dual>& x_nu,
                             std::vector<Dual>& x_phys) {
  const int n = basis.n();
  const int s = n - 1;
  const int na = x_nu.empty() ? 0 : x_nu[0].n;
  const Eigen::MatrixXd& Z = basis.Z();
  x_phys.assign(n, Dual::constant(0.0, na));
  for (int j = 0; j < n; ++j) {
    Dual acc = Dual::constant(0.0, na);
    for (int k = 0; k < s; ++k)
      if (Z(k, j) != 0.0) acc = acc + Z(k, j) * x_nu[k];
    x_phys[j] = acc;
  }
}

double density(const SaltChargeBasis& basis, const EquationOfState& eos,
               const ThermodynamicState& state) {
  Dual p;
  auto x = seed_arguments(state.x_nu, state.p, &p);
  Dual ct = eos.cT(x, p, state.T);
  std::vector<Dual> x_phys;
  physical_fractions_dual(basis, x, x_phys);
  const Eigen::VectorXd m = basis.system().molar_masses();
  double mx = 0.0;
  for (int j = 0; j < basis.n(); ++j) {
    if (!(x_phys[j].v > 0.0) || !(x_phys[j].v < 1.0))
      fail(ErrorCode::DomainError, "physical mole fraction out of (0,1)");
    mx += m[j] * x_phys[j].v;
  }
  return ct.v * mx;
}

Eigen::VectorXd concentrations(const SaltChargeBasis& basis, const EquationOfState& eos,
                               const ThermodynamicState& state) {
  Dual p;
  auto x = seed_arguments(state.x_nu, state.p, &p);
  Dual ct = eos.cT(x, p, state.T);
  if (!(ct.v > 0.0)) fail(ErrorCode::DomainError, "total concentration must be positive");
  return ct.v * state.x_nu;
}

Eigen::VectorXd partial_molar_volumes_fd(const SaltChargeBasis& basis, const EquationOfState& eos,
                                         const ThermodynamicState& state, double step) {
  const int s = static_cast<int>(state.x_nu.size());
  const Eigen::VectorXd& nu_Z = basis.nu_Z();
  // Total volume of a batch with salt-mole vector nmoles at fixed p:
  // Vol = (nu_Z . n) / cT(n / (nu_Z . n)).
  auto volume = [&](const Eigen::VectorXd& nmoles) {
    const double Nw = nu_Z.dot(nmoles);
    Eigen::VectorXd xn = nmoles / Nw;
    std::vector<Dual> x(s);
    for (int i = 0; i < s; ++i) x[i] = Dual::constant(xn[i], 0);
    Dual p = Dual::constant(state.p, 0);
    return Nw / eos.cT(x, p, state.T).v;
  };
  Eigen::VectorXd V(s);
  for (int k = 0; k < s; ++k) {
    Eigen::VectorXd np = state.x_nu, nm = state.x_nu;
    np[k] += step;
    nm[k] -= step;
    V[k] = (volume(np) - volume(nm)) / (2.0 * step);
  }
  return V;
}

Eigen::MatrixXd ideal_thermo_factors(const SaltChargeBasis& basis,
                                     const ThermodynamicState& state) {
  const int s = basis.n() - 1;
  Dual p;
  auto x = seed_arguments(state.x_nu, state.p, &p);
  IdealThermoFactors model;
  std::vector<Dual> X;
  model.eval(basis, x, p, state.T, X);
  Eigen::MatrixXd out(s, s);
  for (int k = 0; k < s; ++k)
    for (int l = 0; l < s; ++l) out(k, l) = X[k * s + l].v;
  return out;
}

double salt_chemical_potential(const SaltChargeBasis& basis, const EquationOfState& eos,
                               const ThermodynamicState& state, int k) {
  Dual p;
  auto x = seed_arguments(state.x_nu, state.p, &p);
  std::vector<Dual> x_phys;
  physical_fractions_dual(basis, x, x_phys);
  const Eigen::MatrixXd& Z = basis.Z();
  const int n = basis.n();
  double lnsum = 0.0;
  for (int j = 0; j < n; ++j) {
    if (Z(k, j) == 0.0) continue;
    if (!(x_phys[j].v > 0.0)) fail(ErrorCode::DomainError, "chemical potential needs x_j > 0");
    lnsum += Z(k, j) * std::log(x_phys[j].v);
  }
  std::vector<Dual> V;
  eos.V_nu(x, p, state.T, basis.nu_Z(), V);
  return PhysicalConstants::R * state.T * lnsum + V[k].v * state.p;
}

}  // namespace osmium
