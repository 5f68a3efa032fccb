#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "osmium/transport.hpp"

using namespace osmium;

namespace {

SpeciesSystem emc() {
  return validate_system({{"EMC", 0.104105, 0}, {"Li+", 0.006935, +1}, {"PF6-", 0.14497, -1}});
}

SpeciesSystem make_system(int n, std::mt19937& rng) {
  std::uniform_int_distribution<int> zd(1, 3);
  std::vector<Species> list;
  for (int i = 0; i < n - 2; ++i) list.push_back({"u" + std::to_string(i), 0.05 + 0.01 * i, 0});
  list.push_back({"cp", 0.02, zd(rng)});
  list.push_back({"cm", 0.03, -zd(rng)});
  return validate_system(list);
}

Eigen::MatrixXd random_diffusivities(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> dd(0.5e-9, 3e-9);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) D(i, j) = D(j, i) = dd(rng);
  return D;
}

Eigen::VectorXd random_electroneutral_c(const SaltChargeBasis& sc, std::mt19937& rng) {
  std::uniform_real_distribution<double> cd(100.0, 2000.0);
  const int n = sc.n();
  Eigen::VectorXd cz = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n - 1; ++i) cz[i] = cd(rng);
  return sc.from_transformed(cz);
}

}  // namespace

TEST_CASE("assemble_M reproduces the hand-evaluated entries") {
  auto sys = emc();
  Eigen::MatrixXd D = Eigen::MatrixXd::Constant(3, 3, 1e-9);
  Eigen::VectorXd c = Eigen::VectorXd::Ones(3);
  Eigen::MatrixXd M = assemble_M(sys, D, c, 300.0);
  // Independent evaluation: off-diagonals -RT/(D cT), diagonals 2 RT/(D cT).
  const double RT = 8.314462618 * 300.0;
  const double off = -RT / (1e-9 * 3.0);
  CHECK(M(0, 1) == doctest::Approx(off).epsilon(1e-14));
  CHECK(M(0, 1) == doctest::Approx(-8.314e11).epsilon(1e-3));
  CHECK(M(0, 0) == doctest::Approx(-2.0 * off).epsilon(1e-14));
  CHECK(M(0, 0) == doctest::Approx(1.663e12).epsilon(1e-3));
}

TEST_CASE("assemble_M rejects bad inputs") {
  auto sys = emc();
  Eigen::MatrixXd D = Eigen::MatrixXd::Constant(3, 3, 1e-9);
  Eigen::VectorXd c = Eigen::VectorXd::Ones(3);
  c[1] = -1.0;
  CHECK_THROWS_AS(assemble_M(sys, D, c, 300.0), Error);
  c[1] = 1.0;
  D(0, 1) = D(1, 0) = 0.0;
  CHECK_THROWS_AS(assemble_M(sys, D, c, 300.0), Error);
}

TEST_CASE("M kernel, symmetry and transformed structure (fuzz n=3..6)") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> cd(50.0, 5000.0);
  for (int n = 3; n <= 6; ++n) {
    auto sys = make_system(n, rng);
    auto sc = build_transform(sys, auto_basis(sys));
    for (int trial = 0; trial < 250; ++trial) {
      Eigen::MatrixXd D = random_diffusivities(n, rng);
      Eigen::VectorXd c(n);
      for (int i = 0; i < n; ++i) c[i] = cd(rng);
      Eigen::MatrixXd M = assemble_M(sys, D, c, 298.15);

      CHECK((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-13 * M.norm());
      CHECK((M * c).norm() <= 1e-12 * M.norm() * c.norm());

      Eigen::VectorXd ce = random_electroneutral_c(sc, rng);
      Eigen::MatrixXd Me = assemble_M(sys, D, ce, 298.15);
      Eigen::MatrixXd MZ = transform_M(sc, Me);
      Eigen::VectorXd cz = sc.to_transformed(ce);
      CHECK((MZ * cz).norm() <= 1e-12 * MZ.norm() * cz.norm());

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (MZ + MZ.transpose()));
      const auto& ev = es.eigenvalues();
      double lmax = ev[n - 1];
      CHECK(std::abs(ev[0]) <= 1e-10 * lmax);   // exactly one structural zero
      CHECK(ev[1] > 1e-6 * lmax);               // second-smallest well separated
      for (int t2 = 0; t2 < 4; ++t2) {
        Eigen::VectorXd v = Eigen::VectorXd::Random(n);
        CHECK(v.dot(MZ * v) >= -1e-12 * MZ.norm() * v.squaredNorm());
      }
    }
  }
}

TEST_CASE("augmentation yields SPD matrices and the gamma identity") {
  // gamma enters in nondimensional form: scale M_Z by D_ref c_ref / RT and
  // concentrations by c_ref, so psi_hat . c_hat stays exactly one.
  std::mt19937 rng(5);
  auto sys = emc();
  auto sc = build_transform(sys, auto_basis(sys));
  const double RT = PhysicalConstants::R * 298.15;
  const double D_ref = 1e-9;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd D = random_diffusivities(3, rng);
    Eigen::VectorXd c = random_electroneutral_c(sc, rng);
    const double c_ref = c.sum();
    double rho = sys.molar_masses().dot(c);
    Eigen::VectorXd psi_hat = sc.psi_Z(rho) * c_ref;
    Eigen::MatrixXd MZ_hat =
        transform_M(sc, assemble_M(sys, D, c, 298.15)) * (D_ref * c_ref / RT);
    const double gamma = 1e-2;
    Eigen::MatrixXd Mg;
    CHECK_NOTHROW(Mg = augment(MZ_hat, psi_hat, gamma));
    Eigen::VectorXd cz_hat = sc.to_transformed(c) / c_ref;
    // c_Z^T Mg c_Z = gamma (psi . c_Z)^2 = gamma
    CHECK(cz_hat.dot(Mg * cz_hat) == doctest::Approx(gamma).epsilon(1e-12));
  }
  // invalid gamma
  Eigen::MatrixXd MZ = Eigen::MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(augment(MZ, Eigen::VectorXd::Ones(3), -1.0), Error);
}

TEST_CASE("smallest augmented eigenvalue scales linearly in gamma") {
  std::mt19937 rng(9);
  auto sys = emc();
  auto sc = build_transform(sys, auto_basis(sys));
  Eigen::MatrixXd D = random_diffusivities(3, rng);
  Eigen::VectorXd c = random_electroneutral_c(sc, rng);
  double rho = sys.molar_masses().dot(c);
  Eigen::VectorXd psi = sc.psi_Z(rho);
  Eigen::MatrixXd MZ = transform_M(sc, assemble_M(sys, D, c, 298.15));
  // Normalize so the matrix scale is O(1); the kernel direction then picks up
  // gamma * (psi . k)^2 to first order.
  double scale = MZ.norm();
  std::vector<double> gammas = {1e-2, 1e-3, 1e-4};
  std::vector<double> lmin;
  for (double g : gammas) {
    Eigen::MatrixXd Mg = MZ / scale + g * psi * psi.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Mg + Mg.transpose()));
    lmin.push_back(es.eigenvalues()[0]);
  }
  CHECK(lmin[0] / lmin[1] == doctest::Approx(10.0).epsilon(0.05));
  CHECK(lmin[1] / lmin[2] == doctest::Approx(10.0).epsilon(0.05));
}

TEST_CASE("Gibbs-Duhem compatible systems are solvable") {
  std::mt19937 rng(31);
  for (int n = 3; n <= 6; ++n) {
    auto sys = make_system(n, rng);
    auto sc = build_transform(sys, auto_basis(sys));
    Eigen::MatrixXd D = random_diffusivities(n, rng);
    Eigen::VectorXd c = random_electroneutral_c(sc, rng);
    Eigen::MatrixXd M = assemble_M(sys, D, c, 298.15);
    // driving forces orthogonal to c (Gibbs-Duhem), one per column
    Eigen::MatrixXd G = Eigen::MatrixXd::Random(n, 2);
    G -= c * (c.transpose() * G) / c.squaredNorm();
    Eigen::MatrixXd N = M.completeOrthogonalDecomposition().solve(G);
    CHECK((M * N - G).norm() <= 1e-10 * G.norm());
  }
}

TEST_CASE("augmented solves satisfy the mass-average constraint") {
  std::mt19937 rng(32);
  for (int n = 3; n <= 6; ++n) {
    auto sys = make_system(n, rng);
    auto sc = build_transform(sys, auto_basis(sys));
    Eigen::MatrixXd D = random_diffusivities(n, rng);
    Eigen::VectorXd c = random_electroneutral_c(sc, rng);
    const double c_ref = c.sum();
    const double RT = PhysicalConstants::R * 298.15;
    double rho = sys.molar_masses().dot(c);
    Eigen::VectorXd psi = sc.psi_Z(rho) * c_ref;
    Eigen::VectorXd cz = sc.to_transformed(c) / c_ref;
    Eigen::MatrixXd MZ = transform_M(sc, assemble_M(sys, D, c, 298.15)) * (1e-9 * c_ref / RT);
    double gamma = 1e-2;
    Eigen::MatrixXd Mg = MZ + gamma * psi * psi.transpose();

    Eigen::MatrixXd GZ = Eigen::MatrixXd::Random(n, 2);
    GZ -= cz * (cz.transpose() * GZ) / cz.squaredNorm();  // compatible data
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Random(2);
    Eigen::MatrixXd NZ = Mg.ldlt().solve(GZ + gamma * psi * v);
    CHECK((psi.transpose() * NZ - v).norm() <= 1e-10 * std::max(1.0, v.norm()));
  }
}

TEST_CASE("viscous stress closed forms") {
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
  CHECK(viscous_stress(1.0, 1.0, zero).norm() == 0.0);

  Eigen::MatrixXd anti(2, 2);
  anti << 0.0, 1.0, -1.0, 0.0;
  CHECK(viscous_stress(2.0, 3.0, anti).norm() <= 1e-15);

  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd tau = viscous_stress(1.0, 1.0, id);
  CHECK((tau - 2.0 * id).norm() <= 1e-14);
}

TEST_CASE("dual-level assembly matches the value-level path") {
  std::mt19937 rng(7);
  auto sys = emc();
  auto sc = build_transform(sys, auto_basis(sys));
  Eigen::VectorXd c = random_electroneutral_c(sc, rng);
  Eigen::MatrixXd D = random_diffusivities(3, rng);

  std::vector<Dual> cd(3), Dd(9);
  for (int i = 0; i < 3; ++i) cd[i] = Dual::constant(c[i], 0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) Dd[i * 3 + j] = Dual::constant(D(i, j), 0);
  std::vector<Dual> Md, MZd;
  assemble_M_dual(sys, Dd, cd, 298.15, Md);
  transform_M_dual(sc, Md, MZd);
  Eigen::MatrixXd Mref = assemble_M(sys, D, c, 298.15);
  Eigen::MatrixXd MZref = transform_M(sc, Mref);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(Md[i * 3 + j].v == doctest::Approx(Mref(i, j)).epsilon(1e-14));
      CHECK(MZd[i * 3 + j].v == doctest::Approx(MZref(i, j)).epsilon(1e-12));
    }
}
