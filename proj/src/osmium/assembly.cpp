#include "osmium/assembly.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "osmium/errors.hpp"

namespace osmium {

DiscreteSystem::DiscreteSystem(const Scenario& scenario)
    : scn_(scenario), mesh_(build_geometry(scenario.geometry)) {
  setup_ = build_spaces(mesh_, scn_.order, scn_.solver.quad_degree);

  NeutralizationBasis nb = scn_.nu ? validate_basis(scn_.system, *scn_.nu)
                                   : auto_basis(scn_.system);
  basis_ = std::make_shared<SaltChargeBasis>(scn_.system, nb);

  const int n = scn_.system.n();
  const int s = n - 1;
  zm_hat_ = basis_->Z() * scn_.system.molar_masses() / scn_.refs.m_ref;

  if (!scn_.mms_case.empty()) mms_ = make_manufactured(scn_.mms_case, basis_->nu_Z());

  // boundary coverage
  for (const auto& name : mesh_.tag_names)
    if (!scn_.bcs.count(name))
      fail(ErrorCode::ConfigError, "no boundary condition for tag '" + name + "'");

  // constraints
  analysis_ = analyze_constraints(scn_.system, scn_.bcs, scn_.material.eos->kind(),
                                  scn_.transient);
  constraints_ = scn_.constraints_auto ? analysis_.recommended : scn_.constraints;
  leak_active_ = false;
  for (const auto& [tag, spec] : scn_.bcs)
    for (int i = 0; i < s; ++i)
      if (spec.salts[i].kind == SaltFluxBC::Kind::Leak) {
        if (leak_active_ && leak_salt_ != i)
          fail(ErrorCode::ConfigError, "leak profile restricted to one salt");
        leak_active_ = true;
        leak_salt_ = i;
      }
  if (leak_active_ && !constraints_.has(Constraint::Kind::Normalization))
    fail(ErrorCode::ConfigError, "a leak BC requires the normalization constraint");

  // layout
  lay_.s = s;
  lay_.nvl = setup_.velocity.ndofs;
  lay_.npl = setup_.pressure.ndofs;
  lay_.nfl = setup_.flux.ndofs;
  lay_.ndg = setup_.scalar.ndofs;
  lay_.nrc = setup_.recon.ndofs;
  int off = 0;
  lay_.v_off = off;
  off += 2 * lay_.nvl;
  lay_.p_off = off;
  off += lay_.npl;
  lay_.N_off = off;
  off += s * lay_.nfl;
  lay_.J_off = off;
  off += lay_.nfl;
  lay_.x_off = off;
  off += s * lay_.ndg;
  lay_.phi_off = off;
  off += lay_.ndg;
  lay_.recon_off = off;
  off += s * lay_.nrc;
  lay_.mult_off = off;
  off += static_cast<int>(constraints_.items.size());
  lay_.total = off;

  setup_boundary_bookkeeping();

  area_ = 0.0;
  for (int t = 0; t < mesh_.n_cells(); ++t) area_ += mesh_.cell_area(t);
}

void DiscreteSystem::setup_boundary_bookkeeping() {
  const int s = lay_.s;
  replaced_.assign(lay_.total, 0);
  facet_bc_.assign(mesh_.boundary.size(), FacetBC{});
  facet_of_edge_.assign(mesh_.n_edges(), -1);

  for (size_t f = 0; f < mesh_.boundary.size(); ++f) {
    const auto& bf = mesh_.boundary[f];
    facet_of_edge_[bf.edge] = static_cast<int>(f);
    const auto& spec = scn_.bcs.at(mesh_.tag_names[bf.tag]);
    facet_bc_[f].spec = &spec;
    if (spec.current.kind == CurrentBC::Kind::WeakDirichlet)
      facet_bc_[f].wd_salt = spec.current.salt;

    // flux rows: salts with strong BCs and the current everywhere
    for (int k = 0; k < s; ++k) {
      if (facet_bc_[f].wd_salt == k) continue;  // enlarged test space
      for (int m = 0; m < setup_.flux.edge_dofs; ++m)
        replaced_[lay_.Ndof(k, setup_.flux.edge_dof(bf.edge, m))] = 1;
    }
    for (int m = 0; m < setup_.flux.edge_dofs; ++m)
      replaced_[lay_.Jdof(setup_.flux.edge_dof(bf.edge, m))] = 1;
  }
  for (int i = 0; i < setup_.velocity.ndofs; ++i)
    if (setup_.velocity.on_boundary[i]) {
      replaced_[lay_.vdof(i, 0)] = 1;
      replaced_[lay_.vdof(i, 1)] = 1;
    }

  // leak chain arclength bookkeeping
  if (leak_active_) {
    std::vector<int> group;
    for (size_t f = 0; f < mesh_.boundary.size(); ++f) {
      const auto& spec = *facet_bc_[f].spec;
      if (spec.salts[leak_salt_].kind == SaltFluxBC::Kind::Leak) group.push_back(f);
    }
    // order the facets into a chain by shared vertices
    std::map<int, std::vector<int>> at_vertex;
    for (int f : group) {
      at_vertex[mesh_.boundary[f].v0].push_back(f);
      at_vertex[mesh_.boundary[f].v1].push_back(f);
    }
    int start_vertex = -1;
    for (const auto& [v, fs] : at_vertex)
      if (fs.size() == 1) {
        // endpoints; pick the one that is a facet v0 so the chain runs forward
        start_vertex = v;
        if (mesh_.boundary[fs[0]].v0 == v) break;
      }
    if (start_vertex < 0)
      fail(ErrorCode::ConfigError, "leak boundary must form an open chain");
    std::vector<char> used(mesh_.boundary.size(), 0);
    int v = start_vertex;
    double sacc = 0.0;
    for (size_t step = 0; step < group.size(); ++step) {
      int fnext = -1;
      for (int f : at_vertex[v])
        if (!used[f]) fnext = f;
      if (fnext < 0) fail(ErrorCode::ConfigError, "leak boundary chain is broken");
      used[fnext] = 1;
      const auto& bf = mesh_.boundary[fnext];
      double s0 = sacc, s1 = sacc + bf.length;
      if (bf.v0 == v) {
        facet_bc_[fnext].leak_s0 = s0;
        facet_bc_[fnext].leak_s1 = s1;
        v = bf.v1;
      } else {
        facet_bc_[fnext].leak_s0 = s1;
        facet_bc_[fnext].leak_s1 = s0;
        v = bf.v0;
      }
      sacc += bf.length;
    }
    for (int f : group) facet_bc_[f].leak_total = sacc;
  }
}

void DiscreteSystem::material_at(const Eigen::VectorXd& xt, double p_phys,
                                 PointEval& out) const {
  const int n = scn_.system.n();
  const int s = n - 1;
  const auto& refs = scn_.refs;
  Dual pd;
  std::vector<Dual> x = seed_arguments(xt, p_phys, &pd);

  physical_fractions_dual(*basis_, x, out.x_phys);
  for (int j = 0; j < n; ++j)
    if (!(out.x_phys[j].v > scn_.material.domain.x_phys_min) ||
        !(out.x_phys[j].v < scn_.material.domain.x_phys_max))
      fail(ErrorCode::DomainError, "physical mole fraction outside the declared domain");

  Dual cT = scn_.material.eos->cT(x, pd, refs.T);
  if (!(cT.v > 0.0)) fail(ErrorCode::DomainError, "non-positive total concentration");
  out.cT_hat = cT / refs.c_ref;

  const Eigen::VectorXd m = scn_.system.molar_masses();
  Dual mx = Dual::constant(0.0, s + 1);
  for (int j = 0; j < n; ++j) mx = mx + m[j] * out.x_phys[j];
  Dual rho = cT * mx;  // kg/m^3
  out.rho_hat = rho / refs.rho_ref();

  out.psi.assign(n, Dual());
  for (int k = 0; k < n; ++k) out.psi[k] = zm_hat_[k] / out.rho_hat;

  std::vector<Dual> V;
  scn_.material.eos->V_nu(x, pd, refs.T, basis_->nu_Z(), V);
  out.Vhat.assign(s, Dual());
  for (int k = 0; k < s; ++k) out.Vhat[k] = V[k] * refs.c_ref;

  scn_.material.factors->eval(*basis_, x, pd, refs.T, out.X);

  // transport matrix: physical c = cT * x_phys
  std::vector<Dual> D, M, MZ;
  scn_.material.diffusivities->eval(x, pd, refs.T, D);
  std::vector<Dual> c(n);
  for (int j = 0; j < n; ++j) c[j] = cT * out.x_phys[j];
  assemble_M_dual(scn_.system, D, c, refs.T, M);
  transform_M_dual(*basis_, M, MZ);
  const double mscale = refs.D_ref * refs.c_ref / refs.RT();
  out.Mg.assign(n * n, Dual());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      out.Mg[a * n + b] = MZ[a * n + b] * mscale + scn_.solver.gamma * out.psi[a] * out.psi[b];

  out.eta_hat = scn_.material.viscosity->eta(x, pd, refs.T) / refs.eta_ref;
  out.zeta_hat = scn_.material.viscosity->zeta(x, pd, refs.T) / refs.eta_ref;

  out.c_hat.assign(s, Dual());
  for (int l = 0; l < s; ++l) out.c_hat[l] = out.cT_hat * x[l];
}

Eigen::VectorXd DiscreteSystem::initial_state() const {
  const int s = lay_.s;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(lay_.total);
  const auto& init = scn_.initial;
  Eigen::VectorXd base = init.x_nu;
  if (base.size() != s) fail(ErrorCode::ConfigError, "initial x_nu has the wrong length");
  const Eigen::VectorXd& nuZ = basis_->nu_Z();

  auto xfun = [&](int slot, const Eigen::Vector2d& p) {
    double val = base[slot];
    if (init.perturb_salt >= 0) {
      double bump = init.perturb_amplitude * std::cos(init.mode_x * M_PI * p.x()) *
                    std::cos(init.mode_y * M_PI * p.y());
      if (slot == init.perturb_salt) val += bump;
      if (slot == 0 && init.perturb_salt != 0)
        val -= bump * nuZ[init.perturb_salt] / nuZ[0];
      else if (slot == 0 && init.perturb_salt == 0)
        val = base[0] + bump;
    }
    return val;
  };

  if (mms_) {
    for (int l = 0; l < s; ++l) {
      Eigen::VectorXd xl = interpolate_dg(mesh_, setup_.scalar, [&](const Eigen::Vector2d& p) {
        return mms_->x_nu(p)[l];
      });
      u.segment(lay_.xdof(l, 0), lay_.ndg) = xl;
    }
  } else {
    for (int l = 0; l < s; ++l) {
      Eigen::VectorXd xl = interpolate_dg(
          mesh_, setup_.scalar, [&](const Eigen::Vector2d& p) { return xfun(l, p); });
      u.segment(lay_.xdof(l, 0), lay_.ndg) = xl;
    }
  }
  solve_recon(u);

  // Warm guess for the algebraic potential under electrode-kinetics BCs: the
  // mean of the per-electrode equilibrium potentials. The potential is an
  // algebraic variable, so this only conditions the first Newton solve.
  {
    double acc = 0.0;
    int cnt = 0;
    const double phi_ref = scn_.refs.phi_ref();
    for (const auto& [tag, spec] : scn_.bcs) {
      if (spec.current.kind == CurrentBC::Kind::LinearButlerVolmer) {
        acc += spec.current.V_e / phi_ref;
        ++cnt;
      } else if (spec.current.kind == CurrentBC::Kind::TanhButlerVolmer) {
        double mu = 0.0;
        Eigen::VectorXd xp = basis_->physical_mole_fractions(base);
        const Eigen::MatrixXd& Z = basis_->Z();
        for (int j = 0; j < scn_.system.n(); ++j)
          if (Z(spec.current.salt, j) != 0.0 && xp[j] > 0.0)
            mu += Z(spec.current.salt, j) * std::log(xp[j]);
        acc += spec.current.V_e / phi_ref + spec.current.mu_coeff * mu;
        ++cnt;
      }
    }
    if (cnt > 0)
      for (int c = 0; c < lay_.ndg; ++c) u[lay_.phidof(c)] = acc / cnt;
  }
  return u;
}

void DiscreteSystem::solve_recon(Eigen::VectorXd& u) const {
  const int s = lay_.s;
  for (int l = 0; l < s; ++l) {
    Eigen::VectorXd dg = u.segment(lay_.xdof(l, 0), lay_.ndg);
    Eigen::VectorXd rc = reconstruct(mesh_, setup_.recon, setup_.scalar, dg);
    u.segment(lay_.rdof(l, 0), lay_.nrc) = rc;
  }
}

void DiscreteSystem::fill_constraint_targets(const Eigen::VectorXd& u) {
  for (auto& c : constraints_.items) {
    if (c.kind == Constraint::Kind::TotalMoles && std::isnan(c.value))
      c.value = salt_moles(u)[c.salt];
    if (c.kind == Constraint::Kind::TotalMass && std::isnan(c.value))
      c.value = total_mass(u);
  }
}

std::vector<char> DiscreteSystem::differential_rows() const {
  std::vector<char> d(lay_.total, 0);
  for (int a = 0; a < lay_.nvl; ++a)
    for (int c = 0; c < 2; ++c) {
      int r = lay_.vdof(a, c);
      if (!replaced_[r]) d[r] = 1;
    }
  for (int l = 0; l < lay_.s; ++l)
    for (int i = 0; i < lay_.ndg; ++i) d[lay_.xdof(l, i)] = 1;
  return d;
}

void DiscreteSystem::assemble(const Eigen::VectorXd& u, Eigen::VectorXd* r,
                              std::vector<Eigen::Triplet<double>>* jac,
                              bool frozen_coeffs) const {
  if (r) r->setZero(lay_.total);
  assemble_cells(u, r, jac, frozen_coeffs, false, nullptr);
  assemble_facets(u, r, jac, frozen_coeffs);
}

void DiscreteSystem::assemble_mass(const Eigen::VectorXd& u, Eigen::VectorXd* G,
                                   std::vector<Eigen::Triplet<double>>* jac) const {
  if (G) G->setZero(lay_.total);
  assemble_cells(u, nullptr, jac, false, true, G);
}

void DiscreteSystem::assemble_cells(const Eigen::VectorXd& u, Eigen::VectorXd* rout,
                                    std::vector<Eigen::Triplet<double>>* jac, bool frozen,
                                    bool mass_mode, Eigen::VectorXd* Gout) const {
  const int s = lay_.s;
  const int n = s + 1;
  const auto& refs = scn_.refs;
  const double p_ref = refs.p_ref();
  const double eps_p = refs.eps_p();
  const double Re = refs.reynolds();
  const double gamma = scn_.solver.gamma;
  const double normz = basis_->charge_norm();
  const Eigen::VectorXd& nuZ = basis_->nu_Z();

  const auto& rule = setup_.cell_rule;
  auto pts = cell_rule_bary(rule);
  const int nq = static_cast<int>(rule.size());

  const int nvl = static_cast<int>(setup_.velocity.cells[0].size());
  const int npl = static_cast<int>(setup_.pressure.cells[0].size());
  const int nfl = setup_.flux.bases[0].ndofs();
  const int ndg = setup_.scalar.per_cell;
  const int nrl = 3;

  const int L = 2 * nvl + npl + n * nfl + n * ndg + s * nrl;
  const int lc_p0 = 2 * nvl;
  const int lc_N0 = lc_p0 + npl;
  const int lc_x0 = lc_N0 + n * nfl;
  const int lc_r0 = lc_x0 + n * ndg;
  auto lc_v = [&](int a, int c) { return 2 * a + c; };
  auto lc_p = [&](int b) { return lc_p0 + b; };
  auto lc_N = [&](int k, int e) { return lc_N0 + k * nfl + e; };
  auto lc_x = [&](int l, int c) { return lc_x0 + l * ndg + c; };
  auto lc_r = [&](int l, int d) { return lc_r0 + l * nrl + d; };

  // chains: recon dofs then pressure dofs
  const int nch = s * nrl + npl;
  auto ch_col = [&](int ch) {
    return (ch < s * nrl) ? lc_r0 + ch : lc_p0 + (ch - s * nrl);
  };

  Eigen::MatrixXd vval, vdx, vdy, pval, pdx, pdy, rval, rdx, rdy, dgval;
  std::vector<Eigen::Matrix2Xd> rtval(nq);
  std::vector<Eigen::VectorXd> rtdiv(nq);

  Eigen::VectorXd rl(L);
  Eigen::MatrixXd Kl(L, L);
  std::vector<int> gmap(L);

  // multiplier bookkeeping
  const auto& cons = constraints_.items;
  const int ncon = static_cast<int>(cons.size());
  std::vector<double> conres(ncon, 0.0);

  PointEval mat;
  Eigen::VectorXd xt(s);

  for (int t = 0; t < mesh_.n_cells(); ++t) {
    const auto& tri = mesh_.tris[t];
    Eigen::Vector2d p0 = mesh_.vertices[tri[0]];
    Eigen::Vector2d e1 = mesh_.vertices[tri[1]] - p0, e2 = mesh_.vertices[tri[2]] - p0;
    const double jac2 = 2.0 * mesh_.cell_area(t);

    setup_.velocity.eval(mesh_, t, pts, vval, vdx, vdy);
    setup_.pressure.eval(mesh_, t, pts, pval, pdx, pdy);
    setup_.recon.eval(mesh_, t, pts, rval, rdx, rdy);
    setup_.scalar.eval(mesh_, t, pts, dgval);
    for (int q = 0; q < nq; ++q)
      setup_.flux.bases[t].eval(p0 + rule[q].x * e1 + rule[q].y * e2, rtval[q], rtdiv[q]);

    // local -> global dof map
    const auto& vd = setup_.velocity.cells[t];
    const auto& pd = setup_.pressure.cells[t];
    const auto& rd = setup_.recon.cells[t];
    auto fdofs = setup_.flux.cell_dofs(mesh_, t);
    for (int a = 0; a < nvl; ++a)
      for (int c = 0; c < 2; ++c) gmap[lc_v(a, c)] = lay_.vdof(vd[a].gdof, c);
    for (int b = 0; b < npl; ++b) gmap[lc_p(b)] = lay_.pdof(pd[b].gdof);
    for (int k = 0; k < n; ++k)
      for (int e = 0; e < nfl; ++e)
        gmap[lc_N(k, e)] = (k < s) ? lay_.Ndof(k, fdofs[e]) : lay_.Jdof(fdofs[e]);
    for (int l = 0; l < n; ++l)
      for (int c = 0; c < ndg; ++c)
        gmap[lc_x(l, c)] = (l < s) ? lay_.xdof(l, setup_.scalar.cell_dof(t, c))
                                   : lay_.phidof(setup_.scalar.cell_dof(t, c));
    for (int l = 0; l < s; ++l)
      for (int d = 0; d < nrl; ++d) gmap[lc_r(l, d)] = lay_.rdof(l, rd[d].gdof);

    rl.setZero();
    Kl.setZero();

    for (int q = 0; q < nq; ++q) {
      const double w = rule[q].w * jac2;
      const Eigen::Vector2d xq = p0 + rule[q].x * e1 + rule[q].y * e2;

      // ---- gather field values ----
      Eigen::Vector2d v = Eigen::Vector2d::Zero();
      Eigen::Matrix2d gv = Eigen::Matrix2d::Zero();  // gv(c, dim)
      for (int a = 0; a < nvl; ++a)
        for (int c = 0; c < 2; ++c) {
          double coef = u[gmap[lc_v(a, c)]];
          v[c] += coef * vval(a, q);
          gv(c, 0) += coef * vdx(a, q);
          gv(c, 1) += coef * vdy(a, q);
        }
      double phat = 0.0;
      Eigen::Vector2d gp = Eigen::Vector2d::Zero();
      for (int b = 0; b < npl; ++b) {
        double coef = u[gmap[lc_p(b)]];
        phat += coef * pval(b, q);
        gp += coef * Eigen::Vector2d(pdx(b, q), pdy(b, q));
      }
      std::vector<Eigen::Vector2d> NZ(n, Eigen::Vector2d::Zero());
      std::vector<double> divNZ(n, 0.0);
      for (int k = 0; k < n; ++k) {
        const double sc = (k < s) ? 1.0 : 1.0 / normz;
        for (int e = 0; e < nfl; ++e) {
          double coef = u[gmap[lc_N(k, e)]] * sc;
          NZ[k] += coef * rtval[q].col(e);
          divNZ[k] += coef * rtdiv[q][e];
        }
      }
      Eigen::VectorXd xraw(n);  // s salts then Phi
      for (int l = 0; l < n; ++l) {
        double acc = 0.0;
        for (int c = 0; c < ndg; ++c) acc += u[gmap[lc_x(l, c)]] * dgval(c, q);
        xraw[l] = acc;
      }
      const double Phi = xraw[s];

      Eigen::VectorXd uu(s);
      Eigen::Matrix2Xd guu(2, s);
      for (int l = 0; l < s; ++l) {
        double acc = 0.0;
        Eigen::Vector2d g = Eigen::Vector2d::Zero();
        for (int d = 0; d < nrl; ++d) {
          double coef = u[gmap[lc_r(l, d)]];
          acc += coef * rval(d, q);
          g += coef * Eigen::Vector2d(rdx(d, q), rdy(d, q));
        }
        uu[l] = acc;
        guu.col(l) = g;
      }
      double S = nuZ.dot(uu);
      if (!(S > 0.0))
        fail(ErrorCode::NonpositiveNormalizer, "normalizer nu_Z . x~ not positive");
      Eigen::Vector2d gS = Eigen::Vector2d::Zero();
      for (int l = 0; l < s; ++l) gS += nuZ[l] * guu.col(l);
      for (int l = 0; l < s; ++l) xt[l] = uu[l] / S;
      Eigen::Matrix2Xd gxt(2, s);
      for (int l = 0; l < s; ++l) gxt.col(l) = (guu.col(l) - xt[l] * gS) / S;

      // ---- chain tables ----
      // dxt(ch, m), dgxt(ch, m) in R^2, dpph(ch), dgph(ch)
      static thread_local std::vector<double> dxt_tab;
      static thread_local std::vector<Eigen::Vector2d> dgxt_tab;
      static thread_local std::vector<double> dpph_tab;
      static thread_local std::vector<Eigen::Vector2d> dgph_tab;
      dxt_tab.assign(nch * s, 0.0);
      dgxt_tab.assign(nch * s, Eigen::Vector2d::Zero());
      dpph_tab.assign(nch, 0.0);
      dgph_tab.assign(nch, Eigen::Vector2d::Zero());
      for (int l = 0; l < s; ++l)
        for (int d = 0; d < nrl; ++d) {
          int ch = l * nrl + d;
          double phi = rval(d, q);
          Eigen::Vector2d gphi(rdx(d, q), rdy(d, q));
          for (int m = 0; m < s; ++m) {
            double dx = ((m == l ? phi : 0.0) - xt[m] * nuZ[l] * phi) / S;
            dxt_tab[ch * s + m] = dx;
            Eigen::Vector2d dg = ((m == l ? gphi : Eigen::Vector2d::Zero().eval()) -
                                  xt[m] * nuZ[l] * gphi - dx * gS) /
                                     S -
                                 gxt.col(m) * (nuZ[l] * phi) / S;
            dgxt_tab[ch * s + m] = dg;
          }
        }
      for (int b = 0; b < npl; ++b) {
        int ch = s * nrl + b;
        dpph_tab[ch] = p_ref * pval(b, q);
        dgph_tab[ch] = Eigen::Vector2d(pdx(b, q), pdy(b, q));
      }

      // ---- material ----
      material_at(xt, phat * p_ref, mat);

      auto chv = [&](const Dual& Q, int ch) {
        double acc = Q.g[s] * dpph_tab[ch];
        for (int m = 0; m < s; ++m) acc += Q.g[m] * dxt_tab[ch * s + m];
        return acc;
      };
      auto gradof = [&](const Dual& Q) {
        Eigen::Vector2d g = Q.g[s] * p_ref * gp;
        for (int m = 0; m < s; ++m) g += Q.g[m] * gxt.col(m);
        return g;
      };
      auto chg = [&](const Dual& Q, int ch) {
        Eigen::Vector2d g = Eigen::Vector2d::Zero();
        for (int m = 0; m < s; ++m) {
          double hrow = Q.H[m][s] * dpph_tab[ch];
          for (int rr = 0; rr < s; ++rr) hrow += Q.H[m][rr] * dxt_tab[ch * s + rr];
          g += hrow * gxt.col(m) + Q.g[m] * dgxt_tab[ch * s + m];
        }
        double hs = Q.H[s][s] * dpph_tab[ch];
        for (int rr = 0; rr < s; ++rr) hs += Q.H[s][rr] * dxt_tab[ch * s + rr];
        g += hs * p_ref * gp + Q.g[s] * p_ref * dgph_tab[ch];
        return g;
      };

      // frequently used values
      Eigen::Vector2d grho = gradof(mat.rho_hat);
      std::vector<Eigen::Vector2d> gpsi(n);
      for (int k = 0; k < n; ++k) gpsi[k] = gradof(mat.psi[k]);
      Eigen::Vector2d psiN = Eigen::Vector2d::Zero();
      for (int k = 0; k < n; ++k) psiN += mat.psi[k].v * NZ[k];
      const double divv = gv.trace();

      if (mass_mode) {
        // momentum: Re (rho v, phi); continuity: (c_l, psi)
        for (int a = 0; a < nvl; ++a)
          for (int c = 0; c < 2; ++c) {
            int row = lc_v(a, c);
            rl[row] += w * Re * mat.rho_hat.v * v[c] * vval(a, q);
            if (jac) {
              for (int b = 0; b < nvl; ++b)
                Kl(row, lc_v(b, c)) += w * Re * mat.rho_hat.v * vval(b, q) * vval(a, q);
              for (int ch = 0; ch < nch; ++ch)
                Kl(row, ch_col(ch)) += w * Re * chv(mat.rho_hat, ch) * v[c] * vval(a, q);
            }
          }
        for (int l = 0; l < s; ++l)
          for (int c = 0; c < ndg; ++c) {
            int row = lc_x(l, c);
            rl[row] += w * mat.c_hat[l].v * dgval(c, q);
            if (jac)
              for (int ch = 0; ch < nch; ++ch)
                Kl(row, ch_col(ch)) += w * chv(mat.c_hat[l], ch) * dgval(c, q);
          }
        continue;
      }

      // ---- manufactured sources ----
      Eigen::Vector2d Smom = Eigen::Vector2d::Zero();
      Eigen::MatrixXd Sosm;
      double Smavg = 0.0;
      if (mms_) {
        PointEval em;
        Eigen::VectorXd xe = mms_->x_nu(xq);
        double pe = mms_->pressure(xq);
        material_at(xe, pe * p_ref, em);
        Eigen::Vector2d ve = mms_->velocity(xq);
        Eigen::Matrix2d gve = mms_->grad_velocity(xq);
        Eigen::Matrix2d Hvx, Hvy;
        mms_->hess_velocity(xq, Hvx, Hvy);
        Eigen::Vector2d gpe = mms_->grad_pressure(xq);
        Eigen::MatrixXd gxe = mms_->grad_x_nu(xq);
        Eigen::MatrixXd Ne = mms_->N_hat(xq);

        auto egrad = [&](const Dual& Q) {
          Eigen::Vector2d g = Q.g[s] * p_ref * gpe;
          for (int m = 0; m < s; ++m) g += Q.g[m] * gxe.row(m).transpose();
          return g;
        };
        // momentum source: Re div(rho v x v) + grad p - div tau + gamma (v - psi^T N)
        Eigen::Vector2d grhoe = egrad(em.rho_hat);
        Eigen::Vector2d conv;
        double divve = gve.trace();
        for (int c = 0; c < 2; ++c)
          conv[c] = em.rho_hat.v * (divve * ve[c] + gve.row(c).dot(ve)) +
                    ve[c] * ve.dot(grhoe);
        Eigen::Vector2d lapv(Hvx.trace(), Hvy.trace());
        Eigen::Vector2d grad_divv(Hvx(0, 0) + Hvy(0, 1), Hvx(1, 0) + Hvy(1, 1));
        Eigen::Vector2d getae = egrad(em.eta_hat);
        Eigen::Vector2d gzetae = egrad(em.zeta_hat);
        // div tau with variable coefficients:
        // tau = 2 eta eps(v) + (zeta - eta) div v I
        Eigen::Matrix2d epsv = 0.5 * (gve + gve.transpose());
        Eigen::Vector2d divtau = em.eta_hat.v * (lapv + grad_divv) +
                                 (em.zeta_hat.v - em.eta_hat.v) * grad_divv +
                                 2.0 * (epsv * getae) + (gzetae - getae) * divve;
        Eigen::Vector2d psiNe = Eigen::Vector2d::Zero();
        for (int k = 0; k < n; ++k) psiNe += em.psi[k].v * Ne.row(k).transpose();
        Smom = Re * conv + gpe - divtau + gamma * (ve - psiNe);

        // transport source per slot
        Sosm.setZero(n, 2);
        for (int k = 0; k < s; ++k) {
          Eigen::Vector2d acc = Eigen::Vector2d::Zero();
          for (int l = 0; l < s; ++l)
            acc -= em.X[l * s + k].v * gxe.row(l).transpose();
          acc += eps_p * (em.psi[k].v - em.Vhat[k].v) * gpe;
          acc += gamma * em.psi[k].v * ve;
          for (int m = 0; m < n; ++m) acc -= em.Mg[k * n + m].v * Ne.row(m).transpose();
          Sosm.row(k) = acc.transpose();
        }
        {
          Eigen::Vector2d acc = eps_p * em.psi[s].v * gpe + gamma * em.psi[s].v * ve;
          for (int m = 0; m < n; ++m) acc -= em.Mg[s * n + m].v * Ne.row(m).transpose();
          Sosm.row(s) = acc.transpose();  // current slot (Phi source; grad Phi = 0)
        }
        // mass-average source: div v - sum_k (grad psi_k . N_k) (div N_k = 0)
        Smavg = divve;
        for (int k = 0; k < n; ++k) {
          Eigen::Vector2d gpsie = egrad(em.psi[k]);
          Smavg -= gpsie.dot(Ne.row(k).transpose());
        }
      }

      // ---- momentum rows ----
      for (int a = 0; a < nvl; ++a) {
        const Eigen::Vector2d gphi(vdx(a, q), vdy(a, q));
        for (int c = 0; c < 2; ++c) {
          int row = lc_v(a, c);
          double conv_c = mat.rho_hat.v * (divv * v[c] + gv.row(c).dot(v)) +
                          v[c] * v.dot(grho);
          double visc = 2.0 * mat.eta_hat.v *
                            (0.5 * (gv.row(c).transpose() + gv.col(c))).dot(gphi) +
                        (mat.zeta_hat.v - mat.eta_hat.v) * divv * gphi[c];
          rl[row] += w * (Re * conv_c * vval(a, q) +
                          gamma * (v[c] - psiN[c]) * vval(a, q) - phat * gphi[c] + visc -
                          Smom[c] * vval(a, q));
          if (!jac) continue;
          // velocity columns
          for (int b = 0; b < nvl; ++b) {
            const Eigen::Vector2d gphib(vdx(b, q), vdy(b, q));
            for (int cc = 0; cc < 2; ++cc) {
              double dconv = mat.rho_hat.v *
                          (gphib[cc] * v[c] + (c == cc ? divv * vval(b, q) : 0.0) +
                           vval(b, q) * gv(c, cc) + (c == cc ? v.dot(gphib) : 0.0)) +
                      ((c == cc ? vval(b, q) * v.dot(grho) : 0.0) +
                       v[c] * vval(b, q) * grho[cc]);
              double dvisc =
                  mat.eta_hat.v * ((c == cc ? gphib.dot(gphi) : 0.0) + gphib[c] * gphi[cc]) +
                  (mat.zeta_hat.v - mat.eta_hat.v) * gphib[cc] * gphi[c];
              Kl(row, lc_v(b, cc)) += w * (Re * dconv * vval(a, q) +
                                           (c == cc ? gamma * vval(b, q) * vval(a, q) : 0.0) +
                                           dvisc);
            }
          }
          // pressure columns (explicit p factor)
          for (int b = 0; b < npl; ++b) Kl(row, lc_p(b)) -= w * pval(b, q) * gphi[c];
          // flux columns
          for (int k = 0; k < n; ++k) {
            const double sc = (k < s) ? 1.0 : 1.0 / normz;
            for (int e = 0; e < nfl; ++e)
              Kl(row, lc_N(k, e)) -=
                  w * gamma * mat.psi[k].v * sc * rtval[q](c, e) * vval(a, q);
          }
          // coefficient chains
          if (!frozen)
            for (int ch = 0; ch < nch; ++ch) {
              double drho = chv(mat.rho_hat, ch);
              Eigen::Vector2d dgrho = chg(mat.rho_hat, ch);
              double dconv = drho * (divv * v[c] + gv.row(c).dot(v)) + v[c] * v.dot(dgrho);
              double dpsiN = 0.0;
              for (int k = 0; k < n; ++k) dpsiN += chv(mat.psi[k], ch) * NZ[k][c];
              double deta = chv(mat.eta_hat, ch);
              double dzeta = chv(mat.zeta_hat, ch);
              double dvisc = 2.0 * deta *
                                 (0.5 * (gv.row(c).transpose() + gv.col(c))).dot(gphi) +
                             (dzeta - deta) * divv * gphi[c];
              Kl(row, ch_col(ch)) += w * (Re * dconv * vval(a, q) -
                                          gamma * dpsiN * vval(a, q) + dvisc);
            }
        }
      }

      // ---- transport rows (slots 0..s-1 salts, slot s current) ----
      for (int k = 0; k < n; ++k) {
        for (int e = 0; e < nfl; ++e) {
          int row = lc_N(k, e);
          const Eigen::Vector2d We = rtval[q].col(e);
          const double dWe = rtdiv[q][e];
          double term = 0.0;
          if (k < s) {
            for (int l = 0; l < s; ++l) {
              const Dual& Xlk = mat.X[l * s + k];
              term += xraw[l] * (gradof(Xlk).dot(We) + Xlk.v * dWe);
            }
            const Dual a_k = mat.psi[k] - mat.Vhat[k];
            term -= eps_p * phat * (gradof(a_k).dot(We) + a_k.v * dWe);
          } else {
            term += normz * Phi * dWe;
            term -= eps_p * phat * (gpsi[s].dot(We) + mat.psi[s].v * dWe);
          }
          term += gamma * mat.psi[k].v * v.dot(We);
          for (int m = 0; m < n; ++m) term -= mat.Mg[k * n + m].v * NZ[m].dot(We);
          if (mms_) term -= Sosm.row(k).dot(We);
          rl[row] += w * term;
          if (!jac) continue;

          // x / Phi columns
          if (k < s) {
            for (int l = 0; l < s; ++l) {
              const Dual& Xlk = mat.X[l * s + k];
              double coef = gradof(Xlk).dot(We) + Xlk.v * dWe;
              for (int c = 0; c < ndg; ++c) Kl(row, lc_x(l, c)) += w * coef * dgval(c, q);
            }
          } else {
            for (int c = 0; c < ndg; ++c)
              Kl(row, lc_x(s, c)) += w * normz * dgval(c, q) * dWe;
          }
          // velocity columns
          for (int b = 0; b < nvl; ++b)
            for (int cc = 0; cc < 2; ++cc)
              Kl(row, lc_v(b, cc)) += w * gamma * mat.psi[k].v * vval(b, q) * We[cc];
          // flux columns
          for (int m = 0; m < n; ++m) {
            const double sc = (m < s) ? 1.0 : 1.0 / normz;
            for (int f = 0; f < nfl; ++f)
              Kl(row, lc_N(m, f)) -=
                  w * mat.Mg[k * n + m].v * sc * rtval[q].col(f).dot(We);
          }
          // explicit pressure factor
          {
            double coefp;
            if (k < s) {
              const Dual a_k = mat.psi[k] - mat.Vhat[k];
              coefp = -eps_p * (gradof(a_k).dot(We) + a_k.v * dWe);
            } else {
              coefp = -eps_p * (gpsi[s].dot(We) + mat.psi[s].v * dWe);
            }
            for (int b = 0; b < npl; ++b) Kl(row, lc_p(b)) += w * coefp * pval(b, q);
          }
          // coefficient chains
          if (!frozen)
            for (int ch = 0; ch < nch; ++ch) {
              double dterm = 0.0;
              if (k < s) {
                for (int l = 0; l < s; ++l) {
                  const Dual& Xlk = mat.X[l * s + k];
                  dterm += xraw[l] * (chg(Xlk, ch).dot(We) + chv(Xlk, ch) * dWe);
                }
                const Dual a_k = mat.psi[k] - mat.Vhat[k];
                dterm -= eps_p * phat * (chg(a_k, ch).dot(We) + chv(a_k, ch) * dWe);
              } else {
                dterm -= eps_p * phat *
                         (chg(mat.psi[s], ch).dot(We) + chv(mat.psi[s], ch) * dWe);
              }
              dterm += gamma * chv(mat.psi[k], ch) * v.dot(We);
              for (int m = 0; m < n; ++m)
                dterm -= chv(mat.Mg[k * n + m], ch) * NZ[m].dot(We);
              Kl(row, ch_col(ch)) += w * dterm;
            }
        }
      }

      // ---- mass-average rows (pressure tested) ----
      for (int b = 0; b < npl; ++b) {
        int row = lc_p(b);
        double term = divv;
        for (int k = 0; k < n; ++k) term -= gpsi[k].dot(NZ[k]) + mat.psi[k].v * divNZ[k];
        if (mms_) term -= Smavg;
        rl[row] += w * term * pval(b, q);
        if (!jac) continue;
        for (int a = 0; a < nvl; ++a) {
          Kl(row, lc_v(a, 0)) += w * vdx(a, q) * pval(b, q);
          Kl(row, lc_v(a, 1)) += w * vdy(a, q) * pval(b, q);
        }
        for (int k = 0; k < n; ++k) {
          const double sc = (k < s) ? 1.0 : 1.0 / normz;
          for (int e = 0; e < nfl; ++e)
            Kl(row, lc_N(k, e)) -= w * sc *
                                   (gpsi[k].dot(rtval[q].col(e)) +
                                    mat.psi[k].v * rtdiv[q][e]) *
                                   pval(b, q);
        }
        if (!frozen)
          for (int ch = 0; ch < nch; ++ch) {
            double dterm = 0.0;
            for (int k = 0; k < n; ++k)
              dterm -= chg(mat.psi[k], ch).dot(NZ[k]) + chv(mat.psi[k], ch) * divNZ[k];
            Kl(row, ch_col(ch)) += w * dterm * pval(b, q);
          }
      }

      // ---- continuity rows (divNZ already carries 1/|z| in the current slot) ----
      for (int l = 0; l < n; ++l) {
        const double sc = (l < s) ? 1.0 : 1.0 / normz;
        for (int c = 0; c < ndg; ++c) {
          int row = lc_x(l, c);
          rl[row] += w * divNZ[l] * dgval(c, q);
          if (!jac) continue;
          for (int e = 0; e < nfl; ++e)
            Kl(row, lc_N(l, e)) += w * sc * rtdiv[q][e] * dgval(c, q);
        }
      }

      // ---- reconstruction rows ----
      for (int l = 0; l < s; ++l)
        for (int d = 0; d < nrl; ++d) {
          int row = lc_r(l, d);
          rl[row] += w * rval(d, q) * (uu[l] - xraw[l]);
          if (!jac) continue;
          for (int d2 = 0; d2 < nrl; ++d2)
            Kl(row, lc_r(l, d2)) += w * rval(d, q) * rval(d2, q);
          for (int c = 0; c < ndg; ++c)
            Kl(row, lc_x(l, c)) -= w * rval(d, q) * dgval(c, q);
        }

      // ---- constraint rows and multiplier columns ----
      for (int ci = 0; ci < ncon; ++ci) {
        const auto& con = cons[ci];
        const int mcol = lay_.mdof(ci);
        const bool is_leak_slot =
            leak_active_ && con.kind == Constraint::Kind::Normalization;
        const double lam = u[mcol];
        switch (con.kind) {
          case Constraint::Kind::Normalization: {
            double val = nuZ.head(s).dot(xraw.head(s)) - 1.0;
            conres[ci] += w * val;
            if (jac)
              for (int l = 0; l < s; ++l)
                for (int c = 0; c < ndg; ++c)
                  jac->emplace_back(mcol, gmap[lc_x(l, c)], w * nuZ[l] * dgval(c, q));
            if (!is_leak_slot) {
              // multiplier column: pressure rows + nu-weighted continuity rows
              for (int b = 0; b < npl; ++b) {
                rl[lc_p(b)] += w * lam * pval(b, q);
                if (jac) jac->emplace_back(gmap[lc_p(b)], mcol, w * pval(b, q));
              }
              for (int l = 0; l < s; ++l)
                for (int c = 0; c < ndg; ++c) {
                  rl[lc_x(l, c)] += w * lam * nuZ[l] * dgval(c, q);
                  if (jac)
                    jac->emplace_back(gmap[lc_x(l, c)], mcol, w * nuZ[l] * dgval(c, q));
                }
            }
            break;
          }
          case Constraint::Kind::MeanPressure: {
            conres[ci] += w * (phat - con.value);
            if (jac)
              for (int b = 0; b < npl; ++b)
                jac->emplace_back(mcol, gmap[lc_p(b)], w * pval(b, q));
            for (int b = 0; b < npl; ++b) {
              rl[lc_p(b)] += w * lam * pval(b, q);
              if (jac) jac->emplace_back(gmap[lc_p(b)], mcol, w * pval(b, q));
            }
            break;
          }
          case Constraint::Kind::MeanPotential: {
            conres[ci] += w * Phi;
            if (jac)
              for (int c = 0; c < ndg; ++c)
                jac->emplace_back(mcol, gmap[lc_x(s, c)], w * dgval(c, q));
            for (int c = 0; c < ndg; ++c) {
              rl[lc_x(s, c)] += w * lam * dgval(c, q);
              if (jac) jac->emplace_back(gmap[lc_x(s, c)], mcol, w * dgval(c, q));
            }
            break;
          }
          case Constraint::Kind::TotalMoles: {
            conres[ci] += w * mat.c_hat[con.salt].v;
            if (jac && !frozen)
              for (int ch = 0; ch < nch; ++ch)
                jac->emplace_back(mcol, gmap[ch_col(ch)], w * chv(mat.c_hat[con.salt], ch));
            for (int c = 0; c < ndg; ++c) {
              rl[lc_x(con.salt, c)] += w * lam * dgval(c, q);
              if (jac) jac->emplace_back(gmap[lc_x(con.salt, c)], mcol, w * dgval(c, q));
            }
            break;
          }
          case Constraint::Kind::TotalMass: {
            conres[ci] += w * mat.rho_hat.v;
            if (jac && !frozen)
              for (int ch = 0; ch < nch; ++ch)
                jac->emplace_back(mcol, gmap[ch_col(ch)], w * chv(mat.rho_hat, ch));
            for (int b = 0; b < npl; ++b) {
              rl[lc_p(b)] += w * lam * pval(b, q);
              if (jac) jac->emplace_back(gmap[lc_p(b)], mcol, w * pval(b, q));
            }
            break;
          }
        }
      }
    }

    // scatter (skip replaced rows)
    if (mass_mode) {
      for (int i = 0; i < L; ++i) {
        int gr = gmap[i];
        if (replaced_[gr]) continue;
        if (Gout) (*Gout)[gr] += rl[i];
        if (jac)
          for (int j = 0; j < L; ++j)
            if (Kl(i, j) != 0.0) jac->emplace_back(gr, gmap[j], Kl(i, j));
      }
    } else {
      for (int i = 0; i < L; ++i) {
        int gr = gmap[i];
        if (replaced_[gr]) continue;
        if (rout) (*rout)[gr] += rl[i];
        if (jac)
          for (int j = 0; j < L; ++j)
            if (Kl(i, j) != 0.0) jac->emplace_back(gr, gmap[j], Kl(i, j));
      }
    }
  }

  // constraint residuals
  if (!mass_mode && rout) {
    for (int ci = 0; ci < ncon; ++ci) {
      const auto& con = cons[ci];
      double val = conres[ci];
      if (con.kind == Constraint::Kind::MeanPotential ||
          con.kind == Constraint::Kind::Normalization ||
          con.kind == Constraint::Kind::MeanPressure) {
        // already offset inside the loop
      } else {
        val -= con.value;  // TotalMoles / TotalMass target
      }
      (*rout)[lay_.mdof(ci)] += val;
    }
  }
}

void DiscreteSystem::assemble_facets(const Eigen::VectorXd& u, Eigen::VectorXd* rout,
                                     std::vector<Eigen::Triplet<double>>* jac,
                                     bool frozen) const {
  const int s = lay_.s;
  const int n = s + 1;
  const auto& refs = scn_.refs;
  const double p_ref = refs.p_ref();
  const double normz = basis_->charge_norm();
  const Eigen::VectorXd& nuZ = basis_->nu_Z();
  const double Jref = refs.J_ref();
  const double phi_ref = refs.phi_ref();

  const int nvl = static_cast<int>(setup_.velocity.cells[0].size());
  const int npl = static_cast<int>(setup_.pressure.cells[0].size());
  const int nfl = setup_.flux.bases[0].ndofs();
  const int ndg = setup_.scalar.per_cell;
  const int nrl = 3;
  const int nch = s * nrl + npl;

  Eigen::MatrixXd vval, vdx, vdy, pval, pdx, pdy, rval, rdx, rdy, dgval;
  PointEval mat;
  Eigen::VectorXd xt(s);

  // multiplier slot of the leak amplitude (shares the normalization slot)
  int leak_col = -1;
  if (leak_active_) {
    for (size_t ci = 0; ci < constraints_.items.size(); ++ci)
      if (constraints_.items[ci].kind == Constraint::Kind::Normalization)
        leak_col = lay_.mdof(static_cast<int>(ci));
  }

  for (size_t f = 0; f < mesh_.boundary.size(); ++f) {
    const auto& bf = mesh_.boundary[f];
    const auto& fbc = facet_bc_[f];
    const auto& spec = *fbc.spec;
    const int t = bf.cell;
    auto qs = facet_quadrature(mesh_, bf, setup_.edge_rule_pts);
    std::vector<std::array<double, 3>> pts;
    for (const auto& q : qs) pts.push_back(q.bary);

    setup_.velocity.eval(mesh_, t, pts, vval, vdx, vdy);
    setup_.pressure.eval(mesh_, t, pts, pval, pdx, pdy);
    setup_.recon.eval(mesh_, t, pts, rval, rdx, rdy);
    setup_.scalar.eval(mesh_, t, pts, dgval);

    const auto& vd = setup_.velocity.cells[t];
    const auto& pdofs = setup_.pressure.cells[t];
    const auto& rd = setup_.recon.cells[t];
    auto fdofs = setup_.flux.cell_dofs(mesh_, t);

    // dof sign: +1 if the oriented-edge normal is outward
    const auto& ed = mesh_.edges[bf.edge];
    Eigen::Vector2d tv = mesh_.vertices[ed.v1] - mesh_.vertices[ed.v0];
    Eigen::Vector2d ne(tv.y(), -tv.x());
    const double sgn = (ne.dot(bf.normal) > 0.0) ? 1.0 : -1.0;
    const Eigen::Vector2d nrm = bf.normal;

    for (size_t q = 0; q < qs.size(); ++q) {
      const double w = qs[q].w;
      const Eigen::Vector2d xq = qs[q].p;

      Eigen::Matrix2Xd rtv;
      Eigen::VectorXd rtd;
      setup_.flux.bases[t].eval(xq, rtv, rtd);

      // gather
      Eigen::Vector2d v = Eigen::Vector2d::Zero();
      for (int a = 0; a < nvl; ++a)
        for (int c = 0; c < 2; ++c) v[c] += u[lay_.vdof(vd[a].gdof, c)] * vval(a, q);
      double phat = 0.0;
      for (int b = 0; b < npl; ++b) phat += u[lay_.pdof(pdofs[b].gdof)] * pval(b, q);
      std::vector<Eigen::Vector2d> NZ(n, Eigen::Vector2d::Zero());
      for (int k = 0; k < n; ++k) {
        const double sc = (k < s) ? 1.0 : 1.0 / normz;
        for (int e = 0; e < nfl; ++e) {
          double coef = (k < s ? u[lay_.Ndof(k, fdofs[e])] : u[lay_.Jdof(fdofs[e])]) * sc;
          NZ[k] += coef * rtv.col(e);
        }
      }
      double Phi = 0.0;
      for (int c = 0; c < ndg; ++c)
        Phi += u[lay_.phidof(setup_.scalar.cell_dof(t, c))] * dgval(c, q);

      Eigen::VectorXd uu(s);
      for (int l = 0; l < s; ++l) {
        double acc = 0.0;
        for (int d = 0; d < nrl; ++d) acc += u[lay_.rdof(l, rd[d].gdof)] * rval(d, q);
        uu[l] = acc;
      }
      double S = nuZ.dot(uu);
      if (!(S > 0.0)) fail(ErrorCode::NonpositiveNormalizer, "boundary normalizer not positive");
      for (int l = 0; l < s; ++l) xt[l] = uu[l] / S;

      // chain tables (values only; no gradients needed on facets)
      std::vector<double> dxt_tab(nch * s, 0.0), dpph_tab(nch, 0.0);
      for (int l = 0; l < s; ++l)
        for (int d = 0; d < nrl; ++d) {
          int ch = l * nrl + d;
          double phi = rval(d, q);
          for (int m = 0; m < s; ++m)
            dxt_tab[ch * s + m] = ((m == l ? phi : 0.0) - xt[m] * nuZ[l] * phi) / S;
        }
      for (int b = 0; b < npl; ++b) dpph_tab[s * nrl + b] = p_ref * pval(b, q);
      auto ch_gdof = [&](int ch) {
        if (ch < s * nrl) {
          int l = ch / nrl, d = ch % nrl;
          return lay_.rdof(l, rd[d].gdof);
        }
        return lay_.pdof(pdofs[ch - s * nrl].gdof);
      };

      material_at(xt, phat * p_ref, mat);
      auto chv = [&](const Dual& Q, int ch) {
        double acc = Q.g[s] * dpph_tab[ch];
        for (int m = 0; m < s; ++m) acc += Q.g[m] * dxt_tab[ch * s + m];
        return acc;
      };

      // current-density boundary data g_J (nondimensional) with derivatives
      double gJ = 0.0, dgJ_dPhi = 0.0;
      std::vector<double> dgJ_ch(nch, 0.0);
      bool gJ_is_wd = false;
      switch (spec.current.kind) {
        case CurrentBC::Kind::Zero:
          break;
        case CurrentBC::Kind::Given:
          gJ = spec.current.value;
          break;
        case CurrentBC::Kind::LinearButlerVolmer: {
          const double i0h = spec.current.i0 / Jref;
          const double Veh = spec.current.V_e / phi_ref;
          gJ = -i0h * spec.current.alpha_sum * (Veh - Phi);
          dgJ_dPhi = i0h * spec.current.alpha_sum;
          break;
        }
        case CurrentBC::Kind::TanhButlerVolmer: {
          const double i0h = spec.current.i0 / Jref;
          const double Veh = spec.current.V_e / phi_ref;
          const int sigma = spec.current.salt;
          Dual pd;
          auto xargs = seed_arguments(xt, phat * p_ref, &pd);
          // mu_sigma / RT = sum_j Z(sigma, j) ln x_j + V_sigma p / RT
          std::vector<Dual> xp;
          physical_fractions_dual(*basis_, xargs, xp);
          Dual mu = Dual::constant(0.0, s + 1);
          const Eigen::MatrixXd& Z = basis_->Z();
          for (int j = 0; j < n; ++j) {
            if (Z(sigma, j) == 0.0) continue;
            if (!(xp[j].v > 0.0)) fail(ErrorCode::DomainError, "BV needs x_j > 0");
            mu = mu + Z(sigma, j) * ad::log(xp[j]);
          }
          std::vector<Dual> V;
          scn_.material.eos->V_nu(xargs, pd, refs.T, basis_->nu_Z(), V);
          mu = mu + V[sigma] * pd / refs.RT();
          Dual arg = spec.current.mu_coeff * mu + (Veh - Phi);
          Dual th = ad::tanh(arg);
          Dual pref = ad::pow(xargs[sigma] / spec.current.x_ref, 2) * (-2.0 * i0h);
          Dual g = pref * th;
          gJ = g.v;
          // Phi enters linearly inside tanh with coefficient -1
          dgJ_dPhi = -pref.v * (1.0 - th.v * th.v);
          for (int ch = 0; ch < nch; ++ch) dgJ_ch[ch] = chv(g, ch);
          break;
        }
        case CurrentBC::Kind::WeakDirichlet:
          gJ_is_wd = true;
          break;
      }

      // ---- velocity BC rows ----
      {
        Eigen::Vector2d gpar = Eigen::Vector2d::Zero();
        switch (spec.velocity.kind) {
          case VelocityBC::Kind::Zero:
            break;
          case VelocityBC::Kind::Rotation: {
            Eigen::Vector2d rel = xq - spec.velocity.center;
            gpar = spec.velocity.theta_dot * Eigen::Vector2d(-rel.y(), rel.x());
            break;
          }
          case VelocityBC::Kind::Manufactured:
            if (mms_) gpar = mms_->velocity(xq);
            break;
        }
        double psiNn = 0.0;
        for (int k = 0; k < n; ++k) psiNn += mat.psi[k].v * NZ[k].dot(nrm);
        Eigen::Vector2d data = psiNn * nrm + gpar;
        for (int a = 0; a < nvl; ++a) {
          if (!setup_.velocity.on_boundary[vd[a].gdof]) continue;
          for (int c = 0; c < 2; ++c) {
            int row = lay_.vdof(vd[a].gdof, c);
            if (rout) (*rout)[row] += w * vval(a, q) * (v[c] - data[c]);
            if (!jac) continue;
            for (int b = 0; b < nvl; ++b)
              jac->emplace_back(row, lay_.vdof(vd[b].gdof, c), w * vval(a, q) * vval(b, q));
            for (int k = 0; k < n; ++k) {
              const double sc = (k < s) ? 1.0 : 1.0 / normz;
              for (int e = 0; e < nfl; ++e) {
                int col = (k < s) ? lay_.Ndof(k, fdofs[e]) : lay_.Jdof(fdofs[e]);
                jac->emplace_back(row, col,
                                  -w * vval(a, q) * mat.psi[k].v * sc *
                                      rtv.col(e).dot(nrm) * nrm[c]);
              }
            }
            if (!frozen)
              for (int ch = 0; ch < nch; ++ch) {
                double dpsiNn = 0.0;
                for (int k = 0; k < n; ++k) dpsiNn += chv(mat.psi[k], ch) * NZ[k].dot(nrm);
                jac->emplace_back(row, ch_gdof(ch), -w * vval(a, q) * dpsiNn * nrm[c]);
              }
          }
        }
      }

      // ---- mass-average boundary (density consistency) term ----
      {
        double psiNn = 0.0;
        for (int k = 0; k < n; ++k) psiNn += mat.psi[k].v * NZ[k].dot(nrm);
        double flux = v.dot(nrm) - psiNn;
        for (int b = 0; b < npl; ++b) {
          int row = lay_.pdof(pdofs[b].gdof);
          if (rout) (*rout)[row] -= w * pval(b, q) * flux;
          if (!jac) continue;
          for (int a = 0; a < nvl; ++a)
            for (int c = 0; c < 2; ++c)
              jac->emplace_back(row, lay_.vdof(vd[a].gdof, c),
                                -w * pval(b, q) * vval(a, q) * nrm[c]);
          for (int k = 0; k < n; ++k) {
            const double sc = (k < s) ? 1.0 : 1.0 / normz;
            for (int e = 0; e < nfl; ++e) {
              int col = (k < s) ? lay_.Ndof(k, fdofs[e]) : lay_.Jdof(fdofs[e]);
              jac->emplace_back(row, col,
                                w * pval(b, q) * mat.psi[k].v * sc * rtv.col(e).dot(nrm));
            }
          }
          if (!frozen)
            for (int ch = 0; ch < nch; ++ch) {
              double dpsiNn = 0.0;
              for (int k = 0; k < n; ++k) dpsiNn += chv(mat.psi[k], ch) * NZ[k].dot(nrm);
              jac->emplace_back(row, ch_gdof(ch), w * pval(b, q) * dpsiNn);
            }
        }
      }

      // ---- strong flux/current BC rows (moments against oriented Legendre) ----
      const double leg[2] = {1.0, 2.0 * qs[q].s_global - 1.0};
      const double invlen = 1.0 / bf.length;
      for (int k = 0; k < s; ++k) {
        if (fbc.wd_salt == k) continue;  // Galerkin rows stay
        const auto& sbc = spec.salts[k];
        double gk = 0.0;
        double dgk_dPhi = 0.0;
        bool chain_data = false;  // data chained through recon/pressure dofs
        double alpha = 0.0;
        double qp_profile = 0.0;
        switch (sbc.kind) {
          case SaltFluxBC::Kind::Zero:
            break;
          case SaltFluxBC::Kind::Given:
            gk = sbc.value;
            break;
          case SaltFluxBC::Kind::Leak: {
            // facet parameter runs from bf.v0; leak_s0/s1 carry the chain direction
            const bool facet_is_global = (bf.v0 == ed.v0);
            double tfac = facet_is_global ? qs[q].s_global : 1.0 - qs[q].s_global;
            double sarc = fbc.leak_s0 + tfac * (fbc.leak_s1 - fbc.leak_s0);
            double tau = sarc / fbc.leak_total;
            qp_profile = 4.0 * tau * (1.0 - tau);
            gk = u[leak_col] * qp_profile;
            break;
          }
          case SaltFluxBC::Kind::ProportionalToCurrent:
            alpha = sbc.alpha;
            gk = alpha * gJ;
            dgk_dPhi = alpha * dgJ_dPhi;
            chain_data = (spec.current.kind == CurrentBC::Kind::TanhButlerVolmer);
            break;
        }
        for (int m = 0; m < setup_.flux.edge_dofs; ++m) {
          int row = lay_.Ndof(k, setup_.flux.edge_dof(bf.edge, m));
          if (rout) (*rout)[row] -= w * invlen * leg[m] * gk;
          if (!jac) continue;
          if (sbc.kind == SaltFluxBC::Kind::Leak)
            jac->emplace_back(row, leak_col, -w * invlen * leg[m] * qp_profile);
          if (dgk_dPhi != 0.0)
            for (int c = 0; c < ndg; ++c)
              jac->emplace_back(row, lay_.phidof(setup_.scalar.cell_dof(t, c)),
                                -w * invlen * leg[m] * dgk_dPhi * dgval(c, q));
          if (chain_data && !frozen)
            for (int ch = 0; ch < nch; ++ch)
              if (dgJ_ch[ch] != 0.0)
                jac->emplace_back(row, ch_gdof(ch),
                                  -w * invlen * leg[m] * alpha * dgJ_ch[ch]);
        }
      }
      // current rows
      for (int m = 0; m < setup_.flux.edge_dofs; ++m) {
        int row = lay_.Jdof(setup_.flux.edge_dof(bf.edge, m));
        double gval = gJ;
        if (gJ_is_wd) {
          const int sigma = spec.current.salt;
          double Nsn = NZ[sigma].dot(nrm);
          gval = spec.current.current_factor * Nsn;
          if (jac) {
            for (int e = 0; e < nfl; ++e)
              jac->emplace_back(row, lay_.Ndof(sigma, fdofs[e]),
                                -w * invlen * leg[m] * spec.current.current_factor *
                                    rtv.col(e).dot(nrm));
          }
        }
        if (rout) (*rout)[row] -= w * invlen * leg[m] * gval;
        if (jac && !gJ_is_wd) {
          if (dgJ_dPhi != 0.0)
            for (int c = 0; c < ndg; ++c)
              jac->emplace_back(row, lay_.phidof(setup_.scalar.cell_dof(t, c)),
                                -w * invlen * leg[m] * dgJ_dPhi * dgval(c, q));
          if (!frozen)
            for (int ch = 0; ch < nch; ++ch)
              if (dgJ_ch[ch] != 0.0)
                jac->emplace_back(row, ch_gdof(ch), -w * invlen * leg[m] * dgJ_ch[ch]);
        }
      }

      // ---- weak-Dirichlet boundary data term on the pinned salt ----
      if (fbc.wd_salt >= 0) {
        const int sigma = fbc.wd_salt;
        const Dual& Xss = mat.X[sigma * s + sigma];
        for (int e = 0; e < nfl; ++e) {
          int row = lay_.Ndof(sigma, fdofs[e]);
          double Wn = rtv.col(e).dot(nrm);
          if (rout) (*rout)[row] -= w * spec.current.x_pin * Xss.v * Wn;
          if (jac && !frozen)
            for (int ch = 0; ch < nch; ++ch)
              jac->emplace_back(row, ch_gdof(ch),
                                -w * spec.current.x_pin * chv(Xss, ch) * Wn);
        }
      }
    }

    // dof-identity part of the strong BC rows (once per facet)
    for (int k = 0; k < s; ++k) {
      if (fbc.wd_salt == k) continue;
      for (int m = 0; m < setup_.flux.edge_dofs; ++m) {
        int row = lay_.Ndof(k, setup_.flux.edge_dof(bf.edge, m));
        if (rout) (*rout)[row] += sgn * u[row];
        if (jac) jac->emplace_back(row, row, sgn);
      }
    }
    for (int m = 0; m < setup_.flux.edge_dofs; ++m) {
      int row = lay_.Jdof(setup_.flux.edge_dof(bf.edge, m));
      if (rout) (*rout)[row] += sgn * u[row];
      if (jac) jac->emplace_back(row, row, sgn);
    }
  }
}

}  // namespace osmium
