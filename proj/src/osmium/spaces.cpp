#include "osmium/spaces.hpp"

#include "osmium/errors.hpp"

namespace osmium {

void LagrangeSpace::eval(const Mesh2D& mesh, int cell,
                         const std::vector<std::array<double, 3>>& pts, Eigen::MatrixXd& val,
                         Eigen::MatrixXd& dx, Eigen::MatrixXd& dy) const {
  const auto& dofs = cells[cell];
  const int nb = static_cast<int>(dofs.size());
  const int np = static_cast<int>(pts.size());
  auto gl = mesh.bary_gradients(cell);
  val.resize(nb, np);
  dx.resize(nb, np);
  dy.resize(nb, np);
  for (int q = 0; q < np; ++q) {
    const double l[3] = {pts[q][0], pts[q][1], pts[q][2]};
    for (int a = 0; a < nb; ++a) {
      val(a, q) = lagrange_value(degree, dofs[a].node, l);
      Eigen::Vector2d g = lagrange_grad(degree, dofs[a].node, l, gl);
      dx(a, q) = g.x();
      dy(a, q) = g.y();
    }
  }
}

void DGSpace::eval(const Mesh2D& mesh, int cell, const std::vector<std::array<double, 3>>& pts,
                   Eigen::MatrixXd& val) const {
  const int np = static_cast<int>(pts.size());
  val.resize(per_cell, np);
  for (int q = 0; q < np; ++q) {
    if (degree == 0) {
      val(0, q) = 1.0;
    } else {
      for (int k = 0; k < 3; ++k) val(k, q) = pts[q][k];
    }
  }
}

std::vector<int> RTSpace::cell_dofs(const Mesh2D& mesh, int cell) const {
  std::vector<int> dofs;
  for (int le = 0; le < 3; ++le) {
    int ge = mesh.tri_edges[cell][le];
    for (int m = 0; m < edge_dofs; ++m) dofs.push_back(edge_dof(ge, m));
  }
  if (order == 2) {
    dofs.push_back(interior_dof(cell, 0));
    dofs.push_back(interior_dof(cell, 1));
  }
  return dofs;
}

LagrangeSpace build_lagrange(const Mesh2D& mesh, int degree) {
  if (degree < 1 || degree > 3) fail(ErrorCode::UnsupportedOrder, "Lagrange degree 1..3 only");
  LagrangeSpace sp;
  sp.degree = degree;
  const int nv = mesh.n_vertices();
  const int ne = mesh.n_edges();
  const int per_edge = degree - 1;
  sp.ndofs = nv + per_edge * ne + (degree == 3 ? mesh.n_cells() : 0);
  sp.cells.resize(mesh.n_cells());
  for (int t = 0; t < mesh.n_cells(); ++t) {
    auto& list = sp.cells[t];
    for (int i = 0; i < 3; ++i) list.push_back({mesh.tris[t][i], {LagNode::Vertex, i, i}});
    if (degree >= 2) {
      for (int le = 0; le < 3; ++le) {
        int ge = mesh.tri_edges[t][le];
        int aloc = (le + 1) % 3, bloc = (le + 2) % 3;
        int ag = mesh.tris[t][aloc];
        // local index of the edge's global low vertex
        int lo_loc = (mesh.edges[ge].v0 == ag) ? aloc : bloc;
        int hi_loc = (lo_loc == aloc) ? bloc : aloc;
        if (degree == 2) {
          list.push_back({nv + ge, {LagNode::EdgeMid, lo_loc, hi_loc}});
        } else {
          list.push_back({nv + 2 * ge + 0, {LagNode::EdgeThird, lo_loc, hi_loc}});
          list.push_back({nv + 2 * ge + 1, {LagNode::EdgeThird, hi_loc, lo_loc}});
        }
      }
      if (degree == 3) list.push_back({nv + 2 * ne + t, {LagNode::Interior, 0, 0}});
    }
  }
  sp.on_boundary.assign(sp.ndofs, 0);
  for (const auto& bf : mesh.boundary) {
    sp.on_boundary[bf.v0] = 1;
    sp.on_boundary[bf.v1] = 1;
    for (int m = 0; m < per_edge; ++m) sp.on_boundary[nv + per_edge * bf.edge + m] = 1;
  }
  return sp;
}

DGSpace build_dg(const Mesh2D& mesh, int degree) {
  if (degree < 0 || degree > 1) fail(ErrorCode::UnsupportedOrder, "DG degree 0..1 only");
  DGSpace sp;
  sp.degree = degree;
  sp.per_cell = (degree == 0) ? 1 : 3;
  sp.ndofs = sp.per_cell * mesh.n_cells();
  return sp;
}

RTSpace build_rt(const Mesh2D& mesh, int order) {
  if (order != 1 && order != 2) fail(ErrorCode::UnsupportedOrder, "flux order must be 1 or 2");
  RTSpace sp;
  sp.order = order;
  sp.edge_dofs = order;
  sp.interior_offset = order * mesh.n_edges();
  sp.ndofs = sp.interior_offset + (order == 2 ? 2 * mesh.n_cells() : 0);
  sp.bases.reserve(mesh.n_cells());
  for (int t = 0; t < mesh.n_cells(); ++t) sp.bases.emplace_back(mesh, t, order);
  sp.on_boundary.assign(sp.ndofs, 0);
  for (const auto& bf : mesh.boundary)
    for (int m = 0; m < order; ++m) sp.on_boundary[sp.edge_dof(bf.edge, m)] = 1;
  return sp;
}

SpaceSetup build_spaces(const Mesh2D& mesh, int order, int quad_degree) {
  if (order != 1 && order != 2) fail(ErrorCode::UnsupportedOrder, "order must be 1 or 2");
  SpaceSetup s;
  s.mesh = &mesh;
  s.order = order;
  s.velocity = build_lagrange(mesh, order + 1);
  s.pressure = build_lagrange(mesh, order);
  s.recon = build_lagrange(mesh, 1);
  s.scalar = build_dg(mesh, order - 1);
  s.flux = build_rt(mesh, order);
  s.quad_degree = (quad_degree > 0) ? quad_degree : 2 * (order + 1) + 2;
  s.cell_rule = triangle_rule(s.quad_degree);
  s.edge_rule_pts = edge_rule(s.quad_degree);
  return s;
}

}  // namespace osmium
