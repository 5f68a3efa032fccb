#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <random>

#include "osmium/thermo.hpp"

using namespace osmium;

namespace {

SpeciesSystem emc() {
  return validate_system({{"EMC", 0.104105, 0}, {"Li+", 0.006935, +1}, {"PF6-", 0.14497, -1}});
}

SaltChargeBasis emc_basis() {
  auto sys = emc();
  return build_transform(sys, auto_basis(sys));
}

// Random normalized transformed composition with all physical fractions positive.
Eigen::VectorXd random_xnu(const SaltChargeBasis& sc, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  const int s = sc.n() - 1;
  while (true) {
    Eigen::VectorXd x(s);
    for (int i = 0; i < s; ++i) x[i] = u(rng);
    x /= sc.nu_Z().dot(x);
    Eigen::VectorXd xp = sc.physical_mole_fractions(x);
    if (xp.minCoeff() > 1e-3) return x;
  }
}

}  // namespace

TEST_CASE("EOS identity 1/cT = V.x on all bundled families") {
  auto sc = emc_basis();
  std::mt19937 rng(11);
  std::vector<std::shared_ptr<EquationOfState>> models = {
      std::make_shared<ConstantVEos>(Eigen::Vector2d(8e-5, 6e-5)),
      std::make_shared<LinearEos>(9000.0, Eigen::Vector2d(500.0, 2500.0)),
      std::make_shared<CompressibleEos>(9000.0, Eigen::Vector2d(500.0, 2500.0), 1e-9)};
  std::uniform_real_distribution<double> pd(-1e5, 1e5);
  for (auto& eos : models) {
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      Eigen::VectorXd xnu = random_xnu(sc, rng);
      double p = pd(rng);
      Dual pdual;
      auto x = seed_arguments(xnu, p, &pdual);
      Dual ct = eos->cT(x, pdual, 298.15);
      std::vector<Dual> V;
      eos->V_nu(x, pdual, 298.15, sc.nu_Z(), V);
      double vx = 0.0;
      for (int k = 0; k < 2; ++k) vx += V[k].v * xnu[k];
      worst = std::max(worst, std::abs(vx - 1.0 / ct.v) * ct.v);
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("density and concentrations against direct formulas") {
  auto sc = emc_basis();
  ConstantVEos eos(Eigen::Vector2d(8e-5, 6e-5));
  ThermodynamicState st{298.15, 0.0, Eigen::Vector2d(0.85, 0.075)};

  // constant-V: rho = (m . Z^T [x;0]) / (V . x)
  double denom = 8e-5 * 0.85 + 6e-5 * 0.075;
  Eigen::VectorXd xp = sc.physical_mole_fractions(st.x_nu);
  double expect = emc().molar_masses().dot(xp) / denom;
  CHECK(density(sc, eos, st) == doctest::Approx(expect).epsilon(1e-12));

  Eigen::VectorXd cnu = concentrations(sc, eos, st);
  CHECK(cnu[0] == doctest::Approx(0.85 / denom).epsilon(1e-12));
  // V . c_nu = 1
  CHECK(8e-5 * cnu[0] + 6e-5 * cnu[1] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("single dominant species limit of the density") {
  auto sc = emc_basis();
  ConstantVEos eos(Eigen::Vector2d(8e-5, 6e-5));
  // x_nu -> e_1 within the domain edge: rho -> cT * m_EMC
  ThermodynamicState st{298.15, 0.0, Eigen::Vector2d(1.0 - 2e-6, 1e-6)};
  double ct = 1.0 / (8e-5 * st.x_nu[0] + 6e-5 * st.x_nu[1]);
  CHECK(density(sc, eos, st) == doctest::Approx(ct * 0.104105).epsilon(1e-4));
}

TEST_CASE("V.c = 1 holds on 1000 random states for every bundled EOS") {
  auto sc = emc_basis();
  std::mt19937 rng(12);
  std::vector<std::shared_ptr<EquationOfState>> models = {
      std::make_shared<ConstantVEos>(Eigen::Vector2d(8e-5, 6e-5)),
      std::make_shared<LinearEos>(9000.0, Eigen::Vector2d(500.0, 2500.0)),
      std::make_shared<CompressibleEos>(9000.0, Eigen::Vector2d(500.0, 2500.0), 1e-9)};
  for (auto& eos : models) {
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      ThermodynamicState st{298.15, 1e4, random_xnu(sc, rng)};
      Eigen::VectorXd cnu = concentrations(sc, *eos, st);
      Dual pd;
      auto x = seed_arguments(st.x_nu, st.p, &pd);
      std::vector<Dual> V;
      eos->V_nu(x, pd, st.T, sc.nu_Z(), V);
      double vc = 0.0;
      for (int k = 0; k < 2; ++k) vc += V[k].v * cnu[k];
      worst = std::max(worst, std::abs(vc - 1.0));
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("linear EOS reproduces the benign-EOS total concentration") {
  auto sc = emc_basis();
  // cT = 2 + x_nu[0] in nondimensional units; at x_nu[0] = 0.5 -> 2.5
  LinearEos eos(2.0, Eigen::Vector2d(1.0, 0.0));
  ThermodynamicState st{298.15, 0.0, Eigen::Vector2d(0.5, 0.25)};
  Eigen::VectorXd cnu = concentrations(sc, eos, st);
  CHECK(cnu[0] / st.x_nu[0] == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("binary benign-EOS volumes recovered by an independent FD oracle") {
  // Two-species toy: Vol(n1, n2) = (n1 + n2) / (A + B n1/(n1+n2)).
  const double A = 2.0, B = 1.0, x = 0.5;
  auto volume = [&](double n1, double n2) { return (n1 + n2) / (A + B * n1 / (n1 + n2)); };
  const double h = 1e-6;
  double V1 = (volume(x + h, 1.0 - x) - volume(x - h, 1.0 - x)) / (2.0 * h);
  double V2 = (volume(x, 1.0 - x + h) - volume(x, 1.0 - x - h)) / (2.0 * h);
  CHECK(V1 == doctest::Approx(0.32).epsilon(1e-8));
  CHECK(V2 == doctest::Approx(0.48).epsilon(1e-8));
  CHECK(x * V1 + (1.0 - x) * V2 == doctest::Approx(1.0 / (A + B * x)).epsilon(1e-10));
}

TEST_CASE("FD recovery of partial molar volumes") {
  auto sc = emc_basis();
  SUBCASE("constant-V model returns its constants") {
    ConstantVEos eos(Eigen::Vector2d(8e-5, 6e-5));
    ThermodynamicState st{298.15, 0.0, Eigen::Vector2d(0.85, 0.075)};
    Eigen::VectorXd V = partial_molar_volumes_fd(sc, eos, st);
    CHECK(V[0] == doctest::Approx(8e-5).epsilon(1e-8));
    CHECK(V[1] == doctest::Approx(6e-5).epsilon(1e-8));
  }
  SUBCASE("composition-dependent model matches analytic V to 1e-6") {
    LinearEos eos(9000.0, Eigen::Vector2d(500.0, 2500.0));
    ThermodynamicState st{298.15, 0.0, Eigen::Vector2d(0.82, 0.09)};
    Eigen::VectorXd Vfd = partial_molar_volumes_fd(sc, eos, st);
    Dual pd;
    auto xd = seed_arguments(st.x_nu, st.p, &pd);
    std::vector<Dual> V;
    eos.V_nu(xd, pd, st.T, sc.nu_Z(), V);
    for (int k = 0; k < 2; ++k)
      CHECK(Vfd[k] == doctest::Approx(V[k].v).epsilon(1e-6));
  }
}

TEST_CASE("ideal thermodynamic factors: closed form and FD consistency") {
  auto sc = emc_basis();
  ThermodynamicState st{298.15, 0.0, Eigen::Vector2d(0.85, 0.075)};
  Eigen::MatrixXd X = ideal_thermo_factors(sc, st);
  CHECK(X(0, 0) == doctest::Approx(1.0 / 0.85).epsilon(1e-12));

  // FD of mu_nu against RT * X rows (pressure fixed).
  ConstantVEos eos(Eigen::Vector2d(8e-5, 6e-5));
  const double RT = PhysicalConstants::R * st.T;
  const double h = 1e-7;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      ThermodynamicState sp = st, sm = st;
      sp.x_nu[l] += h;
      sm.x_nu[l] -= h;
      double fd = (salt_chemical_potential(sc, eos, sp, k) -
                   salt_chemical_potential(sc, eos, sm, k)) /
                  (2.0 * h);
      CHECK(fd == doctest::Approx(RT * X(k, l)).epsilon(1e-6));
    }
}

TEST_CASE("ideal factors stay nonsingular over the open domain") {
  auto sc = emc_basis();
  std::mt19937 rng(13);
  double min_sv = 1e300;
  for (int t = 0; t < 1000; ++t) {
    ThermodynamicState st{298.15, 0.0, random_xnu(sc, rng)};
    Eigen::MatrixXd X = ideal_thermo_factors(sc, st);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
    min_sv = std::min(min_sv, svd.singularValues().minCoeff());
    CHECK(X.allFinite());
  }
  CHECK(min_sv > 0.0);
}

TEST_CASE("pressure derivative of the chemical potential is V_k") {
  auto sc = emc_basis();
  ConstantVEos eos(Eigen::Vector2d(8e-5, 6e-5));
  ThermodynamicState st{298.15, 2e4, Eigen::Vector2d(0.85, 0.075)};
  const double h = 1.0;
  for (int k = 0; k < 2; ++k) {
    ThermodynamicState sp = st, sm = st;
    sp.p += h;
    sm.p -= h;
    double fd = (salt_chemical_potential(sc, eos, sp, k) -
                 salt_chemical_potential(sc, eos, sm, k)) /
                (2.0 * h);
    double expect = (k == 0) ? 8e-5 : 6e-5;
    CHECK(fd == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("symmetric salts at equal compositions have equal potentials") {
  auto sys = validate_system(
      {{"solv", 0.05, 0}, {"K+", 0.039, +1}, {"Na+", 0.023, +1}, {"Cl-", 0.0354, -1}});
  auto sc = build_transform(sys, auto_basis(sys));
  ConstantVEos eos(Eigen::Vector3d(5e-5, 5e-5, 5e-5));
  // equal K+ and Na+ salt fractions
  ThermodynamicState st{298.15, 0.0, Eigen::Vector3d(0.6, 0.1, 0.1)};
  double mu1 = salt_chemical_potential(sc, eos, st, 1);
  double mu2 = salt_chemical_potential(sc, eos, st, 2);
  CHECK(mu1 == doctest::Approx(mu2).epsilon(1e-13));
}

TEST_CASE("evaluators are deterministic and constant-V is bit-stable") {
  auto sc = emc_basis();
  ConstantVEos eos(Eigen::Vector2d(8e-5, 6e-5));
  ThermodynamicState a{298.15, 0.0, Eigen::Vector2d(0.85, 0.075)};
  ThermodynamicState b{298.15, 5e4, Eigen::Vector2d(0.7, 0.15)};
  double d1 = density(sc, eos, a);
  double d2 = density(sc, eos, a);
  CHECK(std::memcmp(&d1, &d2, sizeof(double)) == 0);

  Dual pa, pb;
  auto xa = seed_arguments(a.x_nu, a.p, &pa);
  auto xb = seed_arguments(b.x_nu, b.p, &pb);
  std::vector<Dual> Va, Vb;
  eos.V_nu(xa, pa, a.T, sc.nu_Z(), Va);
  eos.V_nu(xb, pb, b.T, sc.nu_Z(), Vb);
  for (int k = 0; k < 2; ++k)
    CHECK(std::memcmp(&Va[k].v, &Vb[k].v, sizeof(double)) == 0);
}

TEST_CASE("domain violations are reported") {
  auto sc = emc_basis();
  ThermodynamicState bad{298.15, 0.0, Eigen::Vector2d(1.2, -0.1)};
  try {
    ideal_thermo_factors(sc, bad);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DomainError);
  }
}

TEST_CASE("AD dual arithmetic delivers exact Hessians") {
  // f(x, y) = x^2 y + log(x) + tanh(y): check against hand derivatives.
  using ad::Dual;
  double x0 = 0.7, y0 = -0.3;
  Dual x = Dual::variable(x0, 0, 2), y = Dual::variable(y0, 1, 2);
  Dual f = x * x * y + ad::log(x) + ad::tanh(y);
  CHECK(f.v == doctest::Approx(x0 * x0 * y0 + std::log(x0) + std::tanh(y0)).epsilon(1e-15));
  CHECK(f.g[0] == doctest::Approx(2 * x0 * y0 + 1.0 / x0).epsilon(1e-14));
  double th = std::tanh(y0);
  CHECK(f.g[1] == doctest::Approx(x0 * x0 + 1.0 - th * th).epsilon(1e-14));
  CHECK(f.H[0][0] == doctest::Approx(2 * y0 - 1.0 / (x0 * x0)).epsilon(1e-14));
  CHECK(f.H[0][1] == doctest::Approx(2 * x0).epsilon(1e-14));
  CHECK(f.H[1][1] == doctest::Approx(-2.0 * th * (1.0 - th * th)).epsilon(1e-14));
}
