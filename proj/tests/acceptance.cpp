// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exits nonzero if any criterion fails.
#include <Eigen/Eigenvalues>
#include <chrono>
#include <cstdio>
#include <random>

#include "osmium/errors.hpp"
#include "osmium/runner.hpp"
#include "osmium/verify.hpp"

using namespace osmium;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;
std::string g_scenario_dir = "scenarios";

void report(int idx, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %-28s %s\n", pass ? "PASS" : "FAIL", idx, name,
              detail.c_str());
  if (!pass) ++g_failures;
  std::fflush(stdout);
}

std::string fmt(double v) {
  char b[64];
  std::snprintf(b, sizeof(b), "%.3e", v);
  return b;
}

SpeciesSystem emc_system() {
  return validate_system(
      {{"EMC", 0.104105, 0}, {"Li+", 0.006935, +1}, {"PF6-", 0.14497, -1}});
}

// ---------------------------------------------------------------- criterion 1
void criterion_transformation() {
  auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  try {
    // five-species example basis validates
    auto five = validate_system({{"H2O", 0.018015, 0},
                                 {"Na+", 0.022990, +1},
                                 {"Cl-", 0.035453, -1},
                                 {"Mg2+", 0.024305, +2},
                                 {"SO42-", 0.096060, -2}});
    Eigen::MatrixXi nu(4, 5);
    nu << 1, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 2, 1, 0, 0, 2, 0, 0, 1;
    auto basis5 = validate_basis(five, nu);
    auto sc5 = build_transform(five, basis5);
    // Z rows: nu rows then z^T/|z|
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 5; ++j)
        pass = pass && sc5.Z()(i, j) == static_cast<double>(nu(i, j));
    Eigen::VectorXi z = five.charge_vector();
    for (int j = 0; j < 5; ++j)
      pass = pass && std::abs(sc5.Z()(4, j) - z[j] / std::sqrt(10.0)) < 1e-15;

    // EMC displayed matrix
    auto emc = emc_system();
    auto sce = build_transform(emc, auto_basis(emc));
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXd Zexp(3, 3);
    Zexp << 1, 0, 0, 0, 1, 1, 0, r, -r;
    pass = pass && (sce.Z() - Zexp).cwiseAbs().maxCoeff() < 1e-15;

    // Gibbs and dissipation invariances over 1000 trials for n in {3,4,5}
    std::mt19937 rng(2024);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.1, 2.0);
    double worst = 0.0;
    std::vector<SpeciesSystem> systems = {
        emc,
        validate_system({{"s1", 0.1, 0}, {"s2", 0.08, 0}, {"c+", 0.02, 1}, {"c-", 0.03, -1}}),
        five};
    for (auto& sys : systems) {
      auto sc = build_transform(sys, auto_basis(sys));
      const int n = sys.n();
      for (int trial = 0; trial < 1000; ++trial) {
        Eigen::VectorXd cz = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n - 1; ++i) cz[i] = unif(rng);
        Eigen::VectorXd c = sc.from_transformed(cz);
        Eigen::VectorXd mu(n);
        for (int i = 0; i < n; ++i) mu[i] = gauss(rng);
        double g1 = c.dot(mu), g2 = sc.to_transformed(c).dot(sc.Z() * mu);
        worst = std::max(worst, std::abs(g1 - g2) / std::max(1.0, std::abs(g1)));
        Eigen::MatrixXd N(n, 2), G(n, 2);
        for (int i = 0; i < n; ++i)
          for (int d = 0; d < 2; ++d) {
            N(i, d) = gauss(rng);
            G(i, d) = gauss(rng);
          }
        double tr1 = (N.transpose() * G).trace();
        double tr2 = ((sc.Z_invT() * N).transpose() * (sc.Z() * G)).trace();
        worst = std::max(worst, std::abs(tr1 - tr2) / std::max(1.0, std::abs(tr1)));
      }
    }
    pass = pass && worst <= 1e-12;
    detail = "invariance " + fmt(worst) + " (tol 1e-12)";
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  pass = pass && dt < 5.0;
  report(1, "transformation fidelity", pass, detail + ", " + fmt(dt) + " s (budget 5)");
}

// ---------------------------------------------------------------- criterion 2
void criterion_transport() {
  auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  try {
    auto emc = emc_system();
    auto sc = build_transform(emc, auto_basis(emc));
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(0.5, 2.0);
    const double RT = PhysicalConstants::R * 298.15;
    double worst_kernel = 0.0, worst_sym = 0.0, worst_id = 0.0, lam_ratio = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      Eigen::MatrixXd D = Eigen::MatrixXd::Zero(3, 3);
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) D(i, j) = D(j, i) = 1e-9 * unif(rng);
      Eigen::VectorXd cz = Eigen::VectorXd::Zero(3);
      cz[0] = 1e4 * unif(rng);
      cz[1] = 1e3 * unif(rng);
      Eigen::VectorXd c = sc.from_transformed(cz);
      Eigen::MatrixXd M = assemble_M(emc, D, c, 298.15);
      worst_sym = std::max(worst_sym, (M - M.transpose()).cwiseAbs().maxCoeff() / M.norm());
      worst_kernel = std::max(worst_kernel, (M * c).norm() / (M.norm() * c.norm()));
      const double c_ref = c.sum();
      Eigen::MatrixXd MZ = transform_M(sc, M) * (1e-9 * c_ref / RT);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (MZ + MZ.transpose()));
      lam_ratio = std::max(lam_ratio, std::abs(es.eigenvalues()[0]) / es.eigenvalues()[2]);
      double rho = emc.molar_masses().dot(c);
      Eigen::VectorXd psih = sc.psi_Z(rho) * c_ref;
      Eigen::MatrixXd Mg = augment(MZ, psih, 1e-2);  // throws if not SPD
      Eigen::VectorXd czh = sc.to_transformed(c) / c_ref;
      worst_id = std::max(worst_id, std::abs(czh.dot(Mg * czh) - 1e-2));
    }
    pass = worst_kernel <= 1e-12 && worst_sym <= 1e-13 && lam_ratio <= 1e-10 &&
           worst_id <= 1e-12 * 1e-2 + 1e-15;
    detail = "kernel " + fmt(worst_kernel) + ", sym " + fmt(worst_sym) + ", lam " +
             fmt(lam_ratio) + ", gamma-id " + fmt(worst_id);
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  pass = pass && dt < 5.0;
  report(2, "transport structure", pass, detail);
}

// ---------------------------------------------------------------- criterion 3
void criterion_thermo() {
  auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  try {
    auto emc = emc_system();
    auto sc = build_transform(emc, auto_basis(emc));
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    std::vector<std::shared_ptr<EquationOfState>> models = {
        std::make_shared<ConstantVEos>(Eigen::Vector2d(8e-5, 6e-5)),
        std::make_shared<LinearEos>(9000.0, Eigen::Vector2d(500.0, 2500.0)),
        std::make_shared<CompressibleEos>(9000.0, Eigen::Vector2d(500.0, 2500.0), 1e-9)};
    double worst_eos = 0.0;
    for (auto& eos : models)
      for (int trial = 0; trial < 300; ++trial) {
        Eigen::Vector2d xn(unif(rng), 0.03 + 0.1 * unif(rng));
        xn /= sc.nu_Z().dot(xn);
        Dual pd;
        auto x = seed_arguments(xn, 5e4 * unif(rng), &pd);
        Dual ct = eos->cT(x, pd, 298.15);
        std::vector<Dual> V;
        eos->V_nu(x, pd, 298.15, sc.nu_Z(), V);
        worst_eos =
            std::max(worst_eos, std::abs((V[0].v * xn[0] + V[1].v * xn[1]) * ct.v - 1.0));
      }

    // ideal factors against FD of mu
    ConstantVEos eos(Eigen::Vector2d(8e-5, 6e-5));
    ThermodynamicState st{298.15, 0.0, Eigen::Vector2d(0.82, 0.09)};
    Eigen::MatrixXd X = ideal_thermo_factors(sc, st);
    const double RT = PhysicalConstants::R * st.T, h = 1e-7;
    double worst_fd = 0.0;
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) {
        ThermodynamicState sp = st, sm = st;
        sp.x_nu[l] += h;
        sm.x_nu[l] -= h;
        double fd = (salt_chemical_potential(sc, eos, sp, k) -
                     salt_chemical_potential(sc, eos, sm, k)) /
                    (2.0 * h);
        worst_fd = std::max(worst_fd, std::abs(fd - RT * X(k, l)) / std::abs(RT * X(k, l)));
      }

    auto v = appendix_a_volumes(2.0, 1.0, 0.5);
    bool appa = std::abs(v.V1 - 0.32) < 1e-14 && std::abs(v.V2 - 0.48) < 1e-14 &&
                v.identity_defect <= 1e-15;
    pass = worst_eos <= 1e-10 && worst_fd <= 1e-6 && appa;
    detail = "eos-id " + fmt(worst_eos) + ", factor-fd " + fmt(worst_fd) + ", V=(" +
             fmt(v.V1) + "," + fmt(v.V2) + ")";
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  pass = pass && dt < 5.0;
  report(3, "thermodynamic consistency", pass, detail);
}

Scenario base_box_scenario(int nx, int ny) {
  Scenario sc;
  sc.system = emc_system();
  sc.material.eos = std::make_shared<ConstantVEos>(Eigen::Vector2d(8e-5, 6e-5));
  sc.material.factors = std::make_shared<IdealThermoFactors>();
  Eigen::MatrixXd D(3, 3);
  D << 0.0, 2e-9, 1.5e-9, 2e-9, 0.0, 1e-9, 1.5e-9, 1e-9, 0.0;
  sc.material.diffusivities = std::make_shared<ConstantDiffusivity>(D);
  sc.material.viscosity = std::make_shared<ConstantViscosity>(1e-3, 1e-6);
  sc.refs.c_ref = 1.2e4;
  sc.refs.D_ref = 1.5e-9;
  sc.initial.x_nu = Eigen::Vector2d(0.85, 0.075);
  sc.geometry.kind = GeometrySpec::Kind::Rectangle;
  sc.geometry.nx = nx;
  sc.geometry.ny = ny;
  BoundarySpec wall;
  wall.salts.assign(2, SaltFluxBC{});
  for (const char* t : {"left", "right", "bottom", "top"}) sc.bcs[t] = wall;
  return sc;
}

// ---------------------------------------------------------------- criterion 4
void criterion_discrete_structure() {
  auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  try {
    // div inclusion on a 2x2 mesh for both orders
    Mesh2D mesh = make_rectangle(0, 0, 1, 1, 2, 2, false, 0.0);
    double worst_div = 0.0;
    for (int order : {1, 2}) {
      auto setup = build_spaces(mesh, order);
      auto pts = cell_rule_bary(setup.cell_rule);
      Eigen::MatrixXd dgval;
      for (int t = 0; t < mesh.n_cells(); ++t) {
        setup.scalar.eval(mesh, t, pts, dgval);
        const auto& tri = mesh.tris[t];
        Eigen::Vector2d p0 = mesh.vertices[tri[0]];
        Eigen::Vector2d e1 = mesh.vertices[tri[1]] - p0, e2 = mesh.vertices[tri[2]] - p0;
        const int nd = setup.flux.bases[t].ndofs(), pc = setup.scalar.per_cell;
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(pc, pc), rhs = Eigen::MatrixXd::Zero(pc, nd);
        std::vector<Eigen::VectorXd> divs(setup.cell_rule.size());
        for (size_t q = 0; q < setup.cell_rule.size(); ++q) {
          Eigen::Matrix2Xd val;
          Eigen::VectorXd dv;
          setup.flux.bases[t].eval(p0 + setup.cell_rule[q].x * e1 + setup.cell_rule[q].y * e2,
                                   val, dv);
          divs[q] = dv;
          for (int a = 0; a < pc; ++a) {
            for (int j = 0; j < nd; ++j) rhs(a, j) += setup.cell_rule[q].w * dgval(a, q) * dv[j];
            for (int b = 0; b < pc; ++b)
              A(a, b) += setup.cell_rule[q].w * dgval(a, q) * dgval(b, q);
          }
        }
        Eigen::MatrixXd coef = A.fullPivLu().solve(rhs);
        for (size_t q = 0; q < setup.cell_rule.size(); ++q)
          for (int j = 0; j < nd; ++j) {
            double re = 0.0;
            for (int a = 0; a < pc; ++a) re += coef(a, j) * dgval(a, q);
            worst_div = std::max(
                worst_div, std::abs(re - divs[q][j]) / std::max(1.0, std::abs(divs[q][j])));
          }
      }
    }
    pass = pass && worst_div <= 1e-13;

    // inf-sup smoke values on the fixed 8x8 crossed mesh
    Mesh2D crossed = make_rectangle(0, 0, 1, 1, 8, 8, true, 0.0);
    auto s = build_spaces(crossed, 1);
    auto pts = cell_rule_bary(s.cell_rule);
    auto infsup = [&](const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      const Eigen::MatrixXd& Mq) {
      Eigen::MatrixXd S = B * A.ldlt().solve(B.transpose());
      Eigen::LLT<Eigen::MatrixXd> llt(Mq);
      Eigen::MatrixXd L = llt.matrixL();
      Eigen::MatrixXd W = L.triangularView<Eigen::Lower>().solve(S);
      Eigen::MatrixXd T = L.triangularView<Eigen::Lower>().solve(W.transpose()).transpose();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (T + T.transpose()));
      return std::sqrt(std::max(0.0, es.eigenvalues()[1]));
    };
    double beta_stokes, beta_mixed;
    {
      std::vector<int> vmap(s.velocity.ndofs, -1);
      int nv = 0;
      for (int i = 0; i < s.velocity.ndofs; ++i)
        if (!s.velocity.on_boundary[i]) vmap[i] = nv++;
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * nv, 2 * nv);
      Eigen::MatrixXd B = Eigen::MatrixXd::Zero(s.pressure.ndofs, 2 * nv);
      Eigen::MatrixXd Mq = Eigen::MatrixXd::Zero(s.pressure.ndofs, s.pressure.ndofs);
      Eigen::MatrixXd vval, vdx, vdy, pval, pdx, pdy;
      for (int t = 0; t < crossed.n_cells(); ++t) {
        s.velocity.eval(crossed, t, pts, vval, vdx, vdy);
        s.pressure.eval(crossed, t, pts, pval, pdx, pdy);
        double jac = 2.0 * crossed.cell_area(t);
        const auto& vd = s.velocity.cells[t];
        const auto& pd = s.pressure.cells[t];
        for (size_t q = 0; q < pts.size(); ++q) {
          double w = s.cell_rule[q].w * jac;
          for (size_t a = 0; a < vd.size(); ++a) {
            int ia = vmap[vd[a].gdof];
            if (ia < 0) continue;
            for (size_t b = 0; b < vd.size(); ++b) {
              int ib = vmap[vd[b].gdof];
              if (ib < 0) continue;
              double h1 =
                  vval(a, q) * vval(b, q) + vdx(a, q) * vdx(b, q) + vdy(a, q) * vdy(b, q);
              A(2 * ia, 2 * ib) += w * h1;
              A(2 * ia + 1, 2 * ib + 1) += w * h1;
            }
            for (size_t c = 0; c < pd.size(); ++c) {
              B(pd[c].gdof, 2 * ia) += w * pval(c, q) * vdx(a, q);
              B(pd[c].gdof, 2 * ia + 1) += w * pval(c, q) * vdy(a, q);
            }
          }
          for (size_t c = 0; c < pd.size(); ++c)
            for (size_t d = 0; d < pd.size(); ++d)
              Mq(pd[c].gdof, pd[d].gdof) += w * pval(c, q) * pval(d, q);
        }
      }
      beta_stokes = infsup(A, B, Mq);
    }
    {
      std::vector<int> fmap(s.flux.ndofs, -1);
      int nf = 0;
      for (int i = 0; i < s.flux.ndofs; ++i)
        if (!s.flux.on_boundary[i]) fmap[i] = nf++;
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nf, nf);
      Eigen::MatrixXd B = Eigen::MatrixXd::Zero(s.scalar.ndofs, nf);
      Eigen::MatrixXd Mx = Eigen::MatrixXd::Zero(s.scalar.ndofs, s.scalar.ndofs);
      Eigen::MatrixXd dgval;
      for (int t = 0; t < crossed.n_cells(); ++t) {
        s.scalar.eval(crossed, t, pts, dgval);
        auto dofs = s.flux.cell_dofs(crossed, t);
        const auto& tri = crossed.tris[t];
        Eigen::Vector2d p0 = crossed.vertices[tri[0]];
        Eigen::Vector2d e1 = crossed.vertices[tri[1]] - p0, e2 = crossed.vertices[tri[2]] - p0;
        double jac = 2.0 * crossed.cell_area(t);
        for (size_t q = 0; q < pts.size(); ++q) {
          Eigen::Matrix2Xd val;
          Eigen::VectorXd dv;
          s.flux.bases[t].eval(p0 + s.cell_rule[q].x * e1 + s.cell_rule[q].y * e2, val, dv);
          double w = s.cell_rule[q].w * jac;
          for (size_t a = 0; a < dofs.size(); ++a) {
            int ia = fmap[dofs[a]];
            if (ia < 0) continue;
            for (size_t b = 0; b < dofs.size(); ++b) {
              int ib = fmap[dofs[b]];
              if (ib < 0) continue;
              A(ia, ib) += w * (val.col(a).dot(val.col(b)) + dv[a] * dv[b]);
            }
            for (int c = 0; c < s.scalar.per_cell; ++c)
              B(s.scalar.cell_dof(t, c), ia) += w * dgval(c, q) * dv[a];
          }
          for (int c = 0; c < s.scalar.per_cell; ++c)
            for (int d = 0; d < s.scalar.per_cell; ++d)
              Mx(s.scalar.cell_dof(t, c), s.scalar.cell_dof(t, d)) +=
                  w * dgval(c, q) * dgval(d, q);
        }
      }
      beta_mixed = infsup(A, B, Mx);
    }
    pass = pass && beta_stokes > 1e-3 && beta_mixed > 1e-3;

    // constant-test identities for arbitrary states
    Scenario scn = base_box_scenario(3, 3);
    DiscreteSystem sys(scn);
    const auto& lay = sys.layout();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dr(-1.0, 1.0);
    double worst_c = 0.0, worst_d = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      Eigen::VectorXd u = sys.initial_state();
      for (int i = 0; i < u.size(); ++i) u[i] += 0.02 * dr(rng);
      for (size_t ci = 0; ci < sys.constraints().items.size(); ++ci)
        u[lay.mdof(static_cast<int>(ci))] = 0.0;
      Eigen::VectorXd r;
      sys.assemble(u, &r, nullptr);
      double sum = 0.0;
      for (int b = 0; b < lay.npl; ++b) sum += r[lay.pdof(b)];
      worst_c = std::max(worst_c, std::abs(sum));
      // continuity constants against the boundary quadrature oracle
      auto eq = edge_rule(9);
      for (int slot = 0; slot <= lay.s; ++slot) {
        double target = 0.0;
        for (const auto& bf : sys.mesh().boundary) {
          auto qs = facet_quadrature(sys.mesh(), bf, eq);
          for (const auto& q : qs) {
            Eigen::Matrix2Xd val;
            Eigen::VectorXd divs;
            sys.spaces().flux.bases[bf.cell].eval(q.p, val, divs);
            auto fdofs = sys.spaces().flux.cell_dofs(sys.mesh(), bf.cell);
            Eigen::Vector2d N = Eigen::Vector2d::Zero();
            for (size_t e = 0; e < fdofs.size(); ++e)
              N += (slot < lay.s ? u[lay.Ndof(slot, fdofs[e])] : u[lay.Jdof(fdofs[e])]) *
                   val.col(e);
            target += q.w * N.dot(bf.normal);
          }
        }
        if (slot == lay.s) target /= sys.basis().charge_norm();
        double sum2 = 0.0;
        for (int c = 0; c < lay.ndg; ++c)
          sum2 += r[(slot < lay.s) ? lay.xdof(slot, c) : lay.phidof(c)];
        worst_d = std::max(worst_d, std::abs(sum2 - target));
      }
    }
    pass = pass && worst_c <= 1e-12 && worst_d <= 1e-12;
    detail = "div " + fmt(worst_div) + ", infsup (" + fmt(beta_stokes) + "," +
             fmt(beta_mixed) + "), const-tests (" + fmt(worst_c) + "," + fmt(worst_d) + ")";
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  pass = pass && dt < 30.0;
  report(4, "discrete structure", pass, detail);
}

// ---------------------------------------------------------------- criterion 5
void criterion_jacobian() {
  auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  try {
    Scenario sc = base_box_scenario(1, 1);
    sc.material.eos = std::make_shared<LinearEos>(9500.0, Eigen::Vector2d(600.0, 2400.0));
    sc.transient = true;
    auto& ep = sc.bcs["left"];
    ep.current.kind = CurrentBC::Kind::TanhButlerVolmer;
    ep.current.i0 = 1e4;
    ep.current.V_e = 0.1;
    ep.current.salt = 1;
    ep.current.x_ref = 0.075;
    ep.salts[0].kind = SaltFluxBC::Kind::Leak;
    ep.salts[1].kind = SaltFluxBC::Kind::ProportionalToCurrent;
    ep.salts[1].alpha = 0.5;
    auto& en = sc.bcs["right"];
    en = ep;
    en.current.V_e = 0.0;
    en.salts[0] = SaltFluxBC{};
    for (const char* t : {"bottom", "top"}) {
      sc.bcs[t].salts[1].kind = SaltFluxBC::Kind::ProportionalToCurrent;
      sc.bcs[t].salts[1].alpha = 0.5;
    }
    DiscreteSystem sys(sc);
    Eigen::VectorXd u = sys.initial_state();
    sys.fill_constraint_targets(u);
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> dr(-1.0, 1.0);
    for (int i = 0; i < u.size(); ++i) u[i] += 0.05 * dr(rng);
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      Eigen::VectorXd w(u.size());
      for (int i = 0; i < w.size(); ++i) w[i] = dr(rng);
      w /= w.norm();
      worst = std::max(worst, sys.fd_jacobian_check(u, w, 1e-7));
    }
    pass = worst <= 1e-5;
    detail = "fd agreement " + fmt(worst) + " (tol 1e-5)";
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  pass = pass && dt < 30.0;
  report(5, "jacobian exactness", pass, detail);
}

// ---------------------------------------------------------------- criterion 6
void criterion_equilibrium_constraints() {
  auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  try {
    Scenario sc = base_box_scenario(4, 4);
    DiscreteSystem sys(sc);
    Eigen::VectorXd u = sys.initial_state();
    sys.fill_constraint_targets(u);
    NewtonReport rep = solve_steady(sys, u);
    pass = rep.converged && rep.iterations <= 2;
    detail = "equilibrium iters " + std::to_string(rep.iterations);

    // removing the normalization constraint must be flagged singular
    Scenario sc2 = base_box_scenario(4, 4);
    sc2.constraints_auto = false;
    Constraint cp, cf, cm;
    cp.kind = Constraint::Kind::MeanPressure;
    cf.kind = Constraint::Kind::MeanPotential;
    cm.kind = Constraint::Kind::TotalMoles;
    cm.salt = 0;
    cm.value = std::numeric_limits<double>::quiet_NaN();
    sc2.constraints.items = {cp, cf, cm};
    DiscreteSystem sys2(sc2);
    Eigen::VectorXd u2 = sys2.initial_state();
    sys2.fill_constraint_targets(u2);
    u2[sys2.layout().xdof(1, 0)] += 1e-3;
    bool singular = false;
    try {
      solve_steady(sys2, u2);
    } catch (const Error& e) {
      singular = e.code() == ErrorCode::SingularLinearSystem;
    }
    pass = pass && singular;
    detail += std::string(", singular-detected ") + (singular ? "yes" : "NO");

    // analyze_constraints counts
    Scenario bc_zero = base_box_scenario(2, 2);
    auto a1 = analyze_constraints(bc_zero.system, bc_zero.bcs,
                                  EquationOfState::Kind::ConstantPartialMolarVolumes, false);
    Scenario bc_bv = base_box_scenario(2, 2);
    for (const char* t : {"left", "right"}) {
      bc_bv.bcs[t].current.kind = CurrentBC::Kind::LinearButlerVolmer;
      bc_bv.bcs[t].salts[1].kind = SaltFluxBC::Kind::ProportionalToCurrent;
    }
    for (const char* t : {"bottom", "top"})
      bc_bv.bcs[t].salts[1].kind = SaltFluxBC::Kind::ProportionalToCurrent;
    auto a2 = analyze_constraints(bc_bv.system, bc_bv.bcs,
                                  EquationOfState::Kind::CompositionDependent, false);
    auto t1 = analyze_constraints(bc_bv.system, bc_bv.bcs,
                                  EquationOfState::Kind::ConstantPartialMolarVolumes, true);
    auto t2 = analyze_constraints(bc_bv.system, bc_bv.bcs,
                                  EquationOfState::Kind::CompositionDependent, true);
    auto t3 = analyze_constraints(bc_bv.system, bc_bv.bcs,
                                  EquationOfState::Kind::PressureCompositionDependent, true);
    bool counts = a1.k == 4 && a2.k == 3 && t1.k == 2 && t2.ill_posed_warning && t3.k == 1;
    pass = pass && counts;
    detail += ", counts " + std::to_string(a1.k) + "/" + std::to_string(a2.k) + "/" +
              std::to_string(t1.k) + "/warn/" + std::to_string(t3.k);
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  pass = pass && dt < 10.0;
  report(6, "equilibrium & constraints", pass, detail);
}

// ---------------------------------------------------------------- criterion 7
void criterion_convergence_orders() {
  auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  try {
    Scenario d1 = load_scenario(g_scenario_dir + "/mms_diffusion.scn");
    RunOutcome o1 = run_convergence(d1, 3, "acc_run_mms1");
    Scenario d2 = d1;
    d2.order = 2;
    d2.geometry.nx = d2.geometry.ny = 4;
    RunOutcome o2 = run_convergence(d2, 3, "acc_run_mms2");
    Scenario st = load_scenario(g_scenario_dir + "/mms_stokes.scn");
    RunOutcome o3 = run_convergence(st, 3, "acc_run_mms3");
    pass = o1.exit_code == 0 && o2.exit_code == 0 && o3.exit_code == 0 && o1.E1 >= 0.8 &&
           o2.E1 >= 1.8 && o3.E2 >= 2.8;
    detail = "x orders " + fmt(o1.E1) + " / " + fmt(o2.E1) + " (tol 0.8/1.8), v order " +
             fmt(o3.E2) + " (tol 2.8)";
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  pass = pass && dt < 600.0;
  report(7, "convergence orders", pass, detail + ", " + fmt(dt) + " s (budget 600)");
}

// ---------------------------------------------------------------- criterion 8
void criterion_conservation() {
  auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  try {
    Scenario sc = load_scenario(g_scenario_dir + "/confined_case1.scn");
    DiscreteSystem sys(sc);
    Eigen::VectorXd u = sys.initial_state();
    sys.fill_constraint_targets(u);
    TransientReport rep = run_transient(sys, u, sc.time, sc.solver);
    pass = rep.moles_drift.maxCoeff() <= 1e-8 && rep.max_E2 <= 1e-8;
    detail = "drift " + fmt(rep.moles_drift.maxCoeff()) + " (tol 1e-8), E2 " +
             fmt(rep.max_E2) + " (tol 1e-8)";

    // fixed point from a steady solution
    Scenario fp = base_box_scenario(4, 4);
    fp.bcs["left"].current.kind = CurrentBC::Kind::LinearButlerVolmer;
    fp.bcs["left"].current.i0 = 100.0;
    fp.bcs["left"].current.V_e = 0.005;
    fp.bcs["right"].current.kind = CurrentBC::Kind::LinearButlerVolmer;
    fp.bcs["right"].current.i0 = 100.0;
    fp.bcs["right"].current.V_e = 0.0;
    for (const char* t : {"left", "right", "bottom", "top"}) {
      fp.bcs[t].salts[1].kind = SaltFluxBC::Kind::ProportionalToCurrent;
      fp.bcs[t].salts[1].alpha = 0.5;
    }
    fp.constraints_auto = false;
    Constraint cn, cp, cm;
    cn.kind = Constraint::Kind::Normalization;
    cp.kind = Constraint::Kind::MeanPressure;
    cm.kind = Constraint::Kind::TotalMoles;
    cm.salt = 0;
    cm.value = std::numeric_limits<double>::quiet_NaN();
    fp.constraints.items = {cn, cp, cm};
    DiscreteSystem fsys(fp);
    Eigen::VectorXd uf = fsys.initial_state();
    fsys.fill_constraint_targets(uf);
    NewtonReport nrep = solve_steady(fsys, uf);
    double drift = 0.0;
    if (nrep.converged) {
      for (const char* scheme : {"radau1", "radau2"}) {
        Eigen::VectorXd w = uf;
        TransientStepper stepper(fsys, tableau_by_name(scheme), 0.1);
        for (int k = 0; k < 3; ++k) stepper.step(w, 0.1 * k);
        drift = std::max(drift, (w - uf).norm() / uf.norm());
      }
    }
    pass = pass && nrep.converged && drift <= 1e-10;
    detail += ", fixed-point drift " + fmt(drift) + " (tol 1e-10)";
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  pass = pass && dt < 600.0;
  report(8, "conservation", pass, detail + ", " + fmt(dt) + " s (budget 600)");
}

// ---------------------------------------------------------------- criterion 9
void criterion_hull_cell() {
  auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  try {
    Scenario sc = load_scenario(g_scenario_dir + "/mini_hull_transient.scn");
    DiscreteSystem sys(sc);
    Eigen::VectorXd u = sys.initial_state();
    sys.fill_constraint_targets(u);
    std::vector<NewtonReport> log;
    TransientReport rep = run_transient(sys, u, sc.time, sc.solver, &log);
    int first_iters = log.empty() ? 99 : log.front().iterations;
    int late_max = 0;
    for (size_t k = 6; k < log.size(); ++k) late_max = std::max(late_max, log[k].iterations);
    double m0 = rep.steps.front().moles[0];
    double var = 0.0;
    for (const auto& s : rep.steps) var = std::max(var, std::abs(s.moles[0] - m0) / m0);
    pass = first_iters <= 12 && late_max <= 5 && rep.max_E2 <= 1e-6 && var < 1e-3;
    detail = "first-step iters " + std::to_string(first_iters) + " (<=12), late max " +
             std::to_string(late_max) + " (<=5), E2 " + fmt(rep.max_E2) +
             " (tol 1e-6), solvent variation " + fmt(var) + " (<1e-3)";
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  pass = pass && dt < 900.0;
  report(9, "mini hull cell", pass, detail + ", " + fmt(dt) + " s (budget 900)");
}

// --------------------------------------------------------------- criterion 10
void criterion_appendix_a() {
  auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  try {
    auto both = appendix_a_evolution(2.0, 1.0, 100, 0.02, 0.4, true, true);
    auto single = appendix_a_evolution(2.0, 1.0, 100, 0.02, 0.4, false, true);
    pass = both.max_variance <= 1e-12 && single.max_variance > 1e-6;
    detail = "var(both) " + fmt(both.max_variance) + " (tol 1e-12), var(single) " +
             fmt(single.max_variance) + " (>1e-6)";
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  pass = pass && dt < 60.0;
  report(10, "benign-EOS witness", pass, detail);
}

// --------------------------------------------------------------- criterion 11
void criterion_irk_orders() {
  auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  try {
    // implicit Euler amplification on y' = -y, dt = 0.1: exactly 1/1.1
    auto tab1 = radau_iia_1();
    double a11 = tab1.A(0, 0);
    double amp = 1.0 / (1.0 + 0.1 * a11);
    bool euler_exact = amp == 1.0 / 1.1;

    // RadauIIA-2 order on y' = -y via the stage equations
    auto tab2 = radau_iia_2();
    auto step2 = [&](double y, double dtq) {
      Eigen::Matrix2d M = Eigen::Matrix2d::Identity() + dtq * tab2.A;
      Eigen::Vector2d U = M.partialPivLu().solve(Eigen::Vector2d(y, y));
      return U[1];
    };
    std::vector<double> errs;
    for (double dtq : {0.1, 0.05, 0.025}) {
      double y = 1.0;
      int n = static_cast<int>(std::round(1.0 / dtq));
      for (int k = 0; k < n; ++k) y = step2(y, dtq);
      errs.push_back(std::abs(y - std::exp(-1.0)));
    }
    double o1 = std::log(errs[0] / errs[1]) / std::log(2.0);
    double o2 = std::log(errs[1] / errs[2]) / std::log(2.0);
    pass = euler_exact && std::abs(o1 - 3.0) <= 0.2 && std::abs(o2 - 3.0) <= 0.2;
    detail = std::string("euler exact ") + (euler_exact ? "yes" : "NO") + ", radau2 orders " +
             fmt(o1) + "," + fmt(o2) + " (3.0 +- 0.2)";
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  pass = pass && dt < 60.0;
  report(11, "IRK orders", pass, detail);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_scenario_dir = argv[1];
  std::printf("acceptance suite (scenarios: %s)\n", g_scenario_dir.c_str());
  criterion_transformation();
  criterion_transport();
  criterion_thermo();
  criterion_discrete_structure();
  criterion_jacobian();
  criterion_equilibrium_constraints();
  criterion_convergence_orders();
  criterion_conservation();
  criterion_hull_cell();
  criterion_appendix_a();
  criterion_irk_orders();
  std::printf("%s: %d criterion(s) failed\n", g_failures == 0 ? "SUCCESS" : "FAILURE",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
