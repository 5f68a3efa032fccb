#include "osmium/fields.hpp"

#include <Eigen/SparseCholesky>

#include "osmium/errors.hpp"

namespace osmium {

Eigen::Vector2d lagrange_node_position(const Mesh2D& mesh, int cell, const LagNode& node) {
  const auto& tri = mesh.tris[cell];
  const Eigen::Vector2d p0 = mesh.vertices[tri[0]], p1 = mesh.vertices[tri[1]],
                        p2 = mesh.vertices[tri[2]];
  auto at = [&](double l0, double l1, double l2) { return l0 * p0 + l1 * p1 + l2 * p2; };
  double l[3] = {0.0, 0.0, 0.0};
  switch (node.type) {
    case LagNode::Vertex:
      l[node.i] = 1.0;
      break;
    case LagNode::EdgeMid:
      l[node.i] = 0.5;
      l[node.j] = 0.5;
      break;
    case LagNode::EdgeThird:
      l[node.i] = 2.0 / 3.0;
      l[node.j] = 1.0 / 3.0;
      break;
    case LagNode::Interior:
      l[0] = l[1] = l[2] = 1.0 / 3.0;
      break;
  }
  return at(l[0], l[1], l[2]);
}

Eigen::VectorXd interpolate_lagrange(const Mesh2D& mesh, const LagrangeSpace& sp,
                                     const ScalarFn& f) {
  Eigen::VectorXd out(sp.ndofs);
  for (int t = 0; t < mesh.n_cells(); ++t)
    for (const auto& cd : sp.cells[t]) out[cd.gdof] = f(lagrange_node_position(mesh, t, cd.node));
  return out;
}

Eigen::VectorXd interpolate_dg(const Mesh2D& mesh, const DGSpace& sp, const ScalarFn& f) {
  Eigen::VectorXd out(sp.ndofs);
  if (sp.degree == 0) {
    auto rule = triangle_rule(4);
    for (int t = 0; t < mesh.n_cells(); ++t) {
      const auto& tri = mesh.tris[t];
      Eigen::Vector2d p0 = mesh.vertices[tri[0]];
      Eigen::Vector2d e1 = mesh.vertices[tri[1]] - p0, e2 = mesh.vertices[tri[2]] - p0;
      double acc = 0.0;
      for (const auto& q : rule) acc += 2.0 * q.w * f(p0 + q.x * e1 + q.y * e2);
      out[t] = acc;  // mean (reference weights sum to 1/2)
    }
  } else {
    for (int t = 0; t < mesh.n_cells(); ++t)
      for (int k = 0; k < 3; ++k) out[sp.cell_dof(t, k)] = f(mesh.vertices[mesh.tris[t][k]]);
  }
  return out;
}

Eigen::VectorXd interpolate_rt(const Mesh2D& mesh, const RTSpace& sp, const VectorFn& f) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(sp.ndofs);
  auto eq = edge_rule(9);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    Eigen::Vector2d plo = mesh.vertices[mesh.edges[e].v0];
    Eigen::Vector2d phi = mesh.vertices[mesh.edges[e].v1];
    Eigen::Vector2d tv = phi - plo;
    double len = tv.norm();
    Eigen::Vector2d nrm(tv.y() / len, -tv.x() / len);
    for (const auto& q : eq) {
      double un = f(plo + q.t * tv).dot(nrm);
      out[sp.edge_dof(e, 0)] += q.w * un;
      if (sp.order == 2) out[sp.edge_dof(e, 1)] += q.w * un * (2.0 * q.t - 1.0);
    }
  }
  if (sp.order == 2) {
    auto cq = triangle_rule(6);
    for (int t = 0; t < mesh.n_cells(); ++t) {
      const auto& tri = mesh.tris[t];
      Eigen::Vector2d p0 = mesh.vertices[tri[0]];
      Eigen::Vector2d e1 = mesh.vertices[tri[1]] - p0, e2 = mesh.vertices[tri[2]] - p0;
      Eigen::Vector2d acc = Eigen::Vector2d::Zero();
      for (const auto& q : cq) acc += 2.0 * q.w * f(p0 + q.x * e1 + q.y * e2);
      out[sp.interior_dof(t, 0)] = acc.x();
      out[sp.interior_dof(t, 1)] = acc.y();
    }
  }
  return out;
}

std::vector<std::array<double, 3>> cell_rule_bary(const std::vector<QuadPoint2D>& rule) {
  std::vector<std::array<double, 3>> pts;
  pts.reserve(rule.size());
  for (const auto& q : rule) pts.push_back({1.0 - q.x - q.y, q.x, q.y});
  return pts;
}

Eigen::SparseMatrix<double> assemble_mass_matrix(const Mesh2D& mesh, const LagrangeSpace& sp,
                                                 const ScalarFn& coeff, int quad_degree) {
  auto rule = triangle_rule(quad_degree);
  auto pts = cell_rule_bary(rule);
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::MatrixXd val, dx, dy;
  for (int t = 0; t < mesh.n_cells(); ++t) {
    sp.eval(mesh, t, pts, val, dx, dy);
    const auto& dofs = sp.cells[t];
    const double jac = 2.0 * mesh.cell_area(t);
    const auto& tri = mesh.tris[t];
    Eigen::Vector2d p0 = mesh.vertices[tri[0]];
    Eigen::Vector2d e1 = mesh.vertices[tri[1]] - p0, e2 = mesh.vertices[tri[2]] - p0;
    for (size_t q = 0; q < rule.size(); ++q) {
      double c = coeff ? coeff(p0 + rule[q].x * e1 + rule[q].y * e2) : 1.0;
      double w = rule[q].w * jac * c;
      for (size_t a = 0; a < dofs.size(); ++a)
        for (size_t b = 0; b < dofs.size(); ++b)
          trips.emplace_back(dofs[a].gdof, dofs[b].gdof, w * val(a, q) * val(b, q));
    }
  }
  Eigen::SparseMatrix<double> M(sp.ndofs, sp.ndofs);
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

Eigen::VectorXd reconstruct(const Mesh2D& mesh, const LagrangeSpace& recon, const DGSpace& dg,
                            const Eigen::VectorXd& dg_coeffs) {
  auto rule = triangle_rule(4);
  auto pts = cell_rule_bary(rule);
  Eigen::SparseMatrix<double> M = assemble_mass_matrix(mesh, recon, nullptr, 4);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(recon.ndofs);
  Eigen::MatrixXd val, dx, dy, dgval;
  for (int t = 0; t < mesh.n_cells(); ++t) {
    recon.eval(mesh, t, pts, val, dx, dy);
    dg.eval(mesh, t, pts, dgval);
    const auto& dofs = recon.cells[t];
    const double jac = 2.0 * mesh.cell_area(t);
    for (size_t q = 0; q < rule.size(); ++q) {
      double u = 0.0;
      for (int k = 0; k < dg.per_cell; ++k) u += dgval(k, q) * dg_coeffs[dg.cell_dof(t, k)];
      for (size_t a = 0; a < dofs.size(); ++a)
        rhs[dofs[a].gdof] += rule[q].w * jac * val(a, q) * u;
    }
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(M);
  if (solver.info() != Eigen::Success)
    fail(ErrorCode::SingularLinearSystem, "reconstruction mass matrix factorization failed");
  return solver.solve(rhs);
}

Eigen::MatrixXd normalize_mole_fractions(const Eigen::MatrixXd& values,
                                         const Eigen::VectorXd& nu_Z) {
  Eigen::MatrixXd out = values;
  for (int q = 0; q < values.cols(); ++q) {
    double s = nu_Z.dot(values.col(q));
    if (!(s > 0.0))
      fail(ErrorCode::NonpositiveNormalizer, "nu_Z . x must be positive at quadrature points");
    out.col(q) /= s;
  }
  return out;
}

std::vector<EdgeQP> facet_quadrature(const Mesh2D& mesh, const Mesh2D::BoundaryFacet& bf,
                                     const std::vector<QuadPoint1D>& rule) {
  std::vector<EdgeQP> out;
  out.reserve(rule.size());
  const auto& tri = mesh.tris[bf.cell];
  Eigen::Vector2d p0 = mesh.vertices[tri[0]];
  Eigen::Matrix2d J;
  J.col(0) = mesh.vertices[tri[1]] - p0;
  J.col(1) = mesh.vertices[tri[2]] - p0;
  Eigen::Matrix2d Jinv = J.inverse();
  Eigen::Vector2d a = mesh.vertices[bf.v0], b = mesh.vertices[bf.v1];
  const auto& ed = mesh.edges[bf.edge];
  const bool facet_is_global = (bf.v0 == ed.v0);
  for (const auto& q : rule) {
    EdgeQP e;
    e.p = a + q.t * (b - a);
    Eigen::Vector2d ref = Jinv * (e.p - p0);
    e.bary = {1.0 - ref.x() - ref.y(), ref.x(), ref.y()};
    e.w = q.w * bf.length;
    e.s_global = facet_is_global ? q.t : 1.0 - q.t;
    out.push_back(e);
  }
  return out;
}

std::map<int, double> trace_project_flux(const Mesh2D& mesh, const RTSpace& sp,
                                         const std::vector<int>& tags,
                                         const std::function<double(const Eigen::Vector2d&)>& g,
                                         int quad_degree) {
  std::map<int, double> out;
  auto eq = edge_rule(quad_degree);
  for (const auto& bf : mesh.boundary) {
    if (std::find(tags.begin(), tags.end(), bf.tag) == tags.end()) continue;
    const auto& ed = mesh.edges[bf.edge];
    Eigen::Vector2d plo = mesh.vertices[ed.v0], phi = mesh.vertices[ed.v1];
    Eigen::Vector2d tv = phi - plo;
    // the dof uses the lo->hi rotated normal; flip data sign if that normal
    // points inward
    Eigen::Vector2d ne(tv.y(), -tv.x());
    double sgn = (ne.dot(bf.normal) > 0.0) ? 1.0 : -1.0;
    for (int m = 0; m < sp.order; ++m) {
      double acc = 0.0;
      for (const auto& q : eq) {
        double leg = (m == 0) ? 1.0 : (2.0 * q.t - 1.0);
        acc += q.w * g(plo + q.t * tv) * leg;
      }
      out[sp.edge_dof(bf.edge, m)] = sgn * acc;
    }
  }
  return out;
}

std::map<int, Eigen::Vector2d> trace_project_velocity(const Mesh2D& mesh,
                                                      const LagrangeSpace& sp,
                                                      const std::vector<int>& tags,
                                                      const VectorFn& g, int quad_degree) {
  // boundary dofs on the tagged portion
  std::vector<int> bdofs;
  std::map<int, int> index;
  std::vector<Eigen::Triplet<double>> trips;
  auto eq = edge_rule(quad_degree);
  Eigen::MatrixXd val, dx, dy;
  std::vector<std::array<double, 3>> pts;

  auto dof_index = [&](int gdof) {
    auto it = index.find(gdof);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(bdofs.size());
    index[gdof] = id;
    bdofs.push_back(gdof);
    return id;
  };

  std::vector<Eigen::Triplet<double>> mass;
  std::vector<Eigen::Vector2d> rhs_acc;
  for (const auto& bf : mesh.boundary) {
    if (std::find(tags.begin(), tags.end(), bf.tag) == tags.end()) continue;
    auto qs = facet_quadrature(mesh, bf, eq);
    pts.clear();
    for (const auto& q : qs) pts.push_back(q.bary);
    sp.eval(mesh, bf.cell, pts, val, dx, dy);
    const auto& dofs = sp.cells[bf.cell];
    for (size_t a = 0; a < dofs.size(); ++a) {
      if (!sp.on_boundary[dofs[a].gdof]) continue;
      // keep only dofs whose basis is nonzero on this facet
      double mx = 0.0;
      for (size_t q = 0; q < qs.size(); ++q) mx = std::max(mx, std::abs(val(a, q)));
      if (mx < 1e-14) continue;
      int ia = dof_index(dofs[a].gdof);
      if (static_cast<int>(rhs_acc.size()) <= ia) rhs_acc.resize(ia + 1, Eigen::Vector2d::Zero());
      for (size_t q = 0; q < qs.size(); ++q) rhs_acc[ia] += qs[q].w * val(a, q) * g(qs[q].p);
      for (size_t b = 0; b < dofs.size(); ++b) {
        if (!sp.on_boundary[dofs[b].gdof]) continue;
        double mxb = 0.0;
        for (size_t q = 0; q < qs.size(); ++q) mxb = std::max(mxb, std::abs(val(b, q)));
        if (mxb < 1e-14) continue;
        int ib = dof_index(dofs[b].gdof);
        double acc = 0.0;
        for (size_t q = 0; q < qs.size(); ++q) acc += qs[q].w * val(a, q) * val(b, q);
        mass.emplace_back(ia, ib, acc);
      }
    }
  }
  const int nb = static_cast<int>(bdofs.size());
  Eigen::SparseMatrix<double> M(nb, nb);
  M.setFromTriplets(mass.begin(), mass.end());
  Eigen::MatrixXd rhs(nb, 2);
  for (int i = 0; i < nb; ++i) rhs.row(i) = rhs_acc[i].transpose();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(M);
  if (solver.info() != Eigen::Success)
    fail(ErrorCode::SingularLinearSystem, "boundary mass factorization failed");
  Eigen::MatrixXd sol = solver.solve(rhs);
  std::map<int, Eigen::Vector2d> out;
  for (int i = 0; i < nb; ++i) out[bdofs[i]] = sol.row(i).transpose();
  return out;
}

}  // namespace osmium
