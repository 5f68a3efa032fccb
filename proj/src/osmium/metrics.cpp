#include <Eigen/Sparse>
#include <cmath>

#include "osmium/assembly.hpp"
#include "osmium/errors.hpp"

namespace osmium {

namespace {

// Shared quadrature sweep: calls back with the pointwise state.
template <typename F>
void sweep(const DiscreteSystem& sys, const Eigen::VectorXd& u, F&& fn) {
  const auto& mesh = sys.mesh();
  const auto& setup = sys.spaces();
  const auto& lay = sys.layout();
  const int s = lay.s;
  const int n = s + 1;
  const double normz = sys.basis().charge_norm();
  const Eigen::VectorXd& nuZ = sys.basis().nu_Z();
  const auto& rule = setup.cell_rule;
  auto pts = cell_rule_bary(rule);

  Eigen::MatrixXd vval, vdx, vdy, pval, pdx, pdy, rval, rdx, rdy, dgval;
  Eigen::Matrix2Xd rtv;
  Eigen::VectorXd rtd;

  for (int t = 0; t < mesh.n_cells(); ++t) {
    const auto& tri = mesh.tris[t];
    Eigen::Vector2d p0 = mesh.vertices[tri[0]];
    Eigen::Vector2d e1 = mesh.vertices[tri[1]] - p0, e2 = mesh.vertices[tri[2]] - p0;
    const double jac2 = 2.0 * mesh.cell_area(t);
    setup.velocity.eval(mesh, t, pts, vval, vdx, vdy);
    setup.pressure.eval(mesh, t, pts, pval, pdx, pdy);
    setup.recon.eval(mesh, t, pts, rval, rdx, rdy);
    setup.scalar.eval(mesh, t, pts, dgval);
    const auto& vd = setup.velocity.cells[t];
    const auto& pd = setup.pressure.cells[t];
    const auto& rd = setup.recon.cells[t];
    auto fdofs = setup.flux.cell_dofs(mesh, t);

    for (size_t q = 0; q < rule.size(); ++q) {
      const double w = rule[q].w * jac2;
      Eigen::Vector2d xq = p0 + rule[q].x * e1 + rule[q].y * e2;
      setup.flux.bases[t].eval(xq, rtv, rtd);

      Eigen::Vector2d v = Eigen::Vector2d::Zero();
      for (size_t a = 0; a < vd.size(); ++a)
        for (int c = 0; c < 2; ++c) v[c] += u[lay.vdof(vd[a].gdof, c)] * vval(a, q);
      double phat = 0.0;
      for (size_t b = 0; b < pd.size(); ++b) phat += u[lay.pdof(pd[b].gdof)] * pval(b, q);
      Eigen::MatrixXd NZ = Eigen::MatrixXd::Zero(n, 2);
      for (int k = 0; k < n; ++k) {
        const double sc = (k < s) ? 1.0 : 1.0 / normz;
        for (int e = 0; e < rtv.cols(); ++e) {
          double coef = (k < s ? u[lay.Ndof(k, fdofs[e])] : u[lay.Jdof(fdofs[e])]) * sc;
          NZ.row(k) += coef * rtv.col(e).transpose();
        }
      }
      Eigen::VectorXd xraw(n);
      for (int l = 0; l < n; ++l) {
        double acc = 0.0;
        for (int c = 0; c < setup.scalar.per_cell; ++c)
          acc += u[(l < s) ? lay.xdof(l, setup.scalar.cell_dof(t, c))
                           : lay.phidof(setup.scalar.cell_dof(t, c))] *
                 dgval(c, q);
        xraw[l] = acc;
      }
      Eigen::VectorXd xt(s);
      double S = 0.0;
      for (int l = 0; l < s; ++l) {
        double acc = 0.0;
        for (int d = 0; d < 3; ++d) acc += u[lay.rdof(l, rd[d].gdof)] * rval(d, q);
        xt[l] = acc;
        S += nuZ[l] * acc;
      }
      xt /= S;
      fn(w, xq, v, phat, NZ, xraw, xt);
    }
  }
}

}  // namespace

double DiscreteSystem::error_E1(const Eigen::VectorXd& u) const {
  double acc = 0.0;
  const int s = lay_.s;
  sweep(*this, u,
        [&](double w, const Eigen::Vector2d&, const Eigen::Vector2d& v, double phat,
            const Eigen::MatrixXd& NZ, const Eigen::VectorXd&, const Eigen::VectorXd& xt) {
          PointEval mat;
          material_at(xt, phat * scn_.refs.p_ref(), mat);
          Eigen::Vector2d psiN = Eigen::Vector2d::Zero();
          for (int k = 0; k <= s; ++k) psiN += mat.psi[k].v * NZ.row(k).transpose();
          acc += w * (v - psiN).squaredNorm();
        });
  return std::sqrt(acc);
}

double DiscreteSystem::error_E2(const Eigen::VectorXd& u) const {
  double acc = 0.0;
  const Eigen::VectorXd& nuZ = basis_->nu_Z();
  const int s = lay_.s;
  sweep(*this, u,
        [&](double w, const Eigen::Vector2d&, const Eigen::Vector2d&, double,
            const Eigen::MatrixXd&, const Eigen::VectorXd& xraw, const Eigen::VectorXd&) {
          double d = 1.0 - nuZ.dot(xraw.head(s));
          acc += w * d * d;
        });
  return std::sqrt(acc);
}

Eigen::VectorXd DiscreteSystem::salt_moles(const Eigen::VectorXd& u) const {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(lay_.s);
  sweep(*this, u,
        [&](double w, const Eigen::Vector2d&, const Eigen::Vector2d&, double phat,
            const Eigen::MatrixXd&, const Eigen::VectorXd&, const Eigen::VectorXd& xt) {
          PointEval mat;
          material_at(xt, phat * scn_.refs.p_ref(), mat);
          for (int l = 0; l < lay_.s; ++l) acc[l] += w * mat.c_hat[l].v;
        });
  return acc;
}

double DiscreteSystem::total_mass(const Eigen::VectorXd& u) const {
  double acc = 0.0;
  sweep(*this, u,
        [&](double w, const Eigen::Vector2d&, const Eigen::Vector2d&, double phat,
            const Eigen::MatrixXd&, const Eigen::VectorXd&, const Eigen::VectorXd& xt) {
          PointEval mat;
          material_at(xt, phat * scn_.refs.p_ref(), mat);
          acc += w * mat.rho_hat.v;
        });
  return acc;
}

double DiscreteSystem::mms_error_velocity(const Eigen::VectorXd& u) const {
  if (!mms_) fail(ErrorCode::ConfigError, "no manufactured solution in this scenario");
  double acc = 0.0;
  sweep(*this, u,
        [&](double w, const Eigen::Vector2d& xq, const Eigen::Vector2d& v, double,
            const Eigen::MatrixXd&, const Eigen::VectorXd&, const Eigen::VectorXd&) {
          acc += w * (v - mms_->velocity(xq)).squaredNorm();
        });
  return std::sqrt(acc);
}

double DiscreteSystem::mms_error_pressure(const Eigen::VectorXd& u) const {
  if (!mms_) fail(ErrorCode::ConfigError, "no manufactured solution in this scenario");
  double acc = 0.0;
  sweep(*this, u,
        [&](double w, const Eigen::Vector2d& xq, const Eigen::Vector2d&, double phat,
            const Eigen::MatrixXd&, const Eigen::VectorXd&, const Eigen::VectorXd&) {
          double d = phat - mms_->pressure(xq);
          acc += w * d * d;
        });
  return std::sqrt(acc);
}

double DiscreteSystem::mms_error_x(const Eigen::VectorXd& u) const {
  if (!mms_) fail(ErrorCode::ConfigError, "no manufactured solution in this scenario");
  double acc = 0.0;
  sweep(*this, u,
        [&](double w, const Eigen::Vector2d& xq, const Eigen::Vector2d&, double,
            const Eigen::MatrixXd&, const Eigen::VectorXd& xraw, const Eigen::VectorXd&) {
          Eigen::VectorXd xe = mms_->x_nu(xq);
          acc += w * (xraw.head(lay_.s) - xe).squaredNorm();
        });
  return std::sqrt(acc);
}

double DiscreteSystem::weak_dirichlet_error(const Eigen::VectorXd& u) const {
  double acc = 0.0;
  Eigen::MatrixXd dgval;
  for (size_t f = 0; f < mesh_.boundary.size(); ++f) {
    const auto& fbc = facet_bc_[f];
    if (fbc.wd_salt < 0) continue;
    const auto& bf = mesh_.boundary[f];
    auto qs = facet_quadrature(mesh_, bf, setup_.edge_rule_pts);
    std::vector<std::array<double, 3>> pts;
    for (const auto& q : qs) pts.push_back(q.bary);
    setup_.scalar.eval(mesh_, bf.cell, pts, dgval);
    for (size_t q = 0; q < qs.size(); ++q) {
      double x = 0.0;
      for (int c = 0; c < setup_.scalar.per_cell; ++c)
        x += u[lay_.xdof(fbc.wd_salt, setup_.scalar.cell_dof(bf.cell, c))] * dgval(c, q);
      double d = x - fbc.spec->current.x_pin;
      acc += qs[q].w * d * d;
    }
  }
  return std::sqrt(acc);
}

double DiscreteSystem::weak_dirichlet_pressure_ratio(const Eigen::VectorXd& u) const {
  // |p (psi_sigma - V_sigma)| eps_p versus |x_pin X_sigma_sigma| on the pinned tags
  double num = 0.0, den = 0.0;
  Eigen::MatrixXd pval, pdx, pdy, rval, rdx, rdy;
  const int s = lay_.s;
  PointEval mat;
  for (size_t f = 0; f < mesh_.boundary.size(); ++f) {
    const auto& fbc = facet_bc_[f];
    if (fbc.wd_salt < 0) continue;
    const auto& bf = mesh_.boundary[f];
    auto qs = facet_quadrature(mesh_, bf, setup_.edge_rule_pts);
    std::vector<std::array<double, 3>> pts;
    for (const auto& q : qs) pts.push_back(q.bary);
    setup_.pressure.eval(mesh_, bf.cell, pts, pval, pdx, pdy);
    setup_.recon.eval(mesh_, bf.cell, pts, rval, rdx, rdy);
    const auto& pd = setup_.pressure.cells[bf.cell];
    const auto& rd = setup_.recon.cells[bf.cell];
    const Eigen::VectorXd& nuZ = basis_->nu_Z();
    for (size_t q = 0; q < qs.size(); ++q) {
      double phat = 0.0;
      for (size_t b = 0; b < pd.size(); ++b) phat += u[lay_.pdof(pd[b].gdof)] * pval(b, q);
      Eigen::VectorXd xt(s);
      double S = 0.0;
      for (int l = 0; l < s; ++l) {
        double acc = 0.0;
        for (int d = 0; d < 3; ++d) acc += u[lay_.rdof(l, rd[d].gdof)] * rval(d, q);
        xt[l] = acc;
        S += nuZ[l] * acc;
      }
      xt /= S;
      material_at(xt, phat * scn_.refs.p_ref(), mat);
      const int sg = fbc.wd_salt;
      double Ip = std::abs(phat) * scn_.refs.eps_p() *
                  std::abs(mat.psi[sg].v - mat.Vhat[sg].v);
      double main = std::abs(fbc.spec->current.x_pin * mat.X[sg * s + sg].v);
      num += qs[q].w * Ip;
      den += qs[q].w * main;
    }
  }
  return (den > 0.0) ? num / den : 0.0;
}

double DiscreteSystem::fd_jacobian_check(const Eigen::VectorXd& u, const Eigen::VectorXd& w,
                                         double eps) const {
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd r0;
  assemble(u, &r0, &trips);
  Eigen::SparseMatrix<double> K(lay_.total, lay_.total);
  K.setFromTriplets(trips.begin(), trips.end());
  Eigen::VectorXd Kw = K * w;

  Eigen::VectorXd rp, rm;
  assemble(u + eps * w, &rp, nullptr);
  assemble(u - eps * w, &rm, nullptr);
  Eigen::VectorXd fd = (rp - rm) / (2.0 * eps);
  double scale = Kw.cwiseAbs().maxCoeff();
  return (fd - Kw).cwiseAbs().maxCoeff() / std::max(scale, 1e-30);
}

}  // namespace osmium
