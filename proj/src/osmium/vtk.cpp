#include "osmium/vtk.hpp"

#include <cstdio>
#include <fstream>

#include "osmium/errors.hpp"

namespace osmium {

void write_vtk(const std::string& path, const DiscreteSystem& sys, const Eigen::VectorXd& u) {
  const auto& mesh = sys.mesh();
  const auto& lay = sys.layout();
  const auto& setup = sys.spaces();
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out.precision(12);

  out << "# vtk DataFile Version 2.0\n";
  out << "osmium fields\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  for (const auto& v : mesh.vertices) out << v.x() << " " << v.y() << " 0\n";
  out << "CELLS " << mesh.n_cells() << " " << 4 * mesh.n_cells() << "\n";
  for (const auto& t : mesh.tris) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "CELL_TYPES " << mesh.n_cells() << "\n";
  for (int t = 0; t < mesh.n_cells(); ++t) out << "5\n";

  // vertex dofs of the Lagrange spaces coincide with mesh vertices
  out << "POINT_DATA " << mesh.n_vertices() << "\n";
  out << "VECTORS velocity double\n";
  for (int vtx = 0; vtx < mesh.n_vertices(); ++vtx)
    out << u[lay.vdof(vtx, 0)] << " " << u[lay.vdof(vtx, 1)] << " 0\n";
  out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (int vtx = 0; vtx < mesh.n_vertices(); ++vtx) out << u[lay.pdof(vtx)] << "\n";

  out << "CELL_DATA " << mesh.n_cells() << "\n";
  const int s = lay.s;
  auto cell_mean_dg = [&](int slot, int t) {
    if (setup.scalar.degree == 0)
      return u[(slot < s) ? lay.xdof(slot, t) : lay.phidof(t)];
    double acc = 0.0;
    for (int c = 0; c < 3; ++c)
      acc += u[(slot < s) ? lay.xdof(slot, setup.scalar.cell_dof(t, c))
                          : lay.phidof(setup.scalar.cell_dof(t, c))];
    return acc / 3.0;
  };
  for (int slot = 0; slot < s; ++slot) {
    out << "SCALARS x_nu_" << slot << " double 1\nLOOKUP_TABLE default\n";
    for (int t = 0; t < mesh.n_cells(); ++t) out << cell_mean_dg(slot, t) << "\n";
  }
  out << "SCALARS phi_Z double 1\nLOOKUP_TABLE default\n";
  for (int t = 0; t < mesh.n_cells(); ++t) out << cell_mean_dg(s, t) << "\n";

  // cell-averaged fluxes
  auto rule = triangle_rule(2);
  for (int slot = 0; slot <= s; ++slot) {
    if (slot < s)
      out << "VECTORS N_" << slot << " double\n";
    else
      out << "VECTORS J double\n";
    for (int t = 0; t < mesh.n_cells(); ++t) {
      const auto& tri = mesh.tris[t];
      Eigen::Vector2d p0 = mesh.vertices[tri[0]];
      Eigen::Vector2d e1 = mesh.vertices[tri[1]] - p0, e2 = mesh.vertices[tri[2]] - p0;
      auto fdofs = setup.flux.cell_dofs(mesh, t);
      Eigen::Vector2d acc = Eigen::Vector2d::Zero();
      for (const auto& q : rule) {
        Eigen::Matrix2Xd val;
        Eigen::VectorXd dv;
        setup.flux.bases[t].eval(p0 + q.x * e1 + q.y * e2, val, dv);
        for (size_t e = 0; e < fdofs.size(); ++e) {
          double coef = (slot < s) ? u[lay.Ndof(slot, fdofs[e])] : u[lay.Jdof(fdofs[e])];
          acc += 2.0 * q.w * coef * val.col(e);
        }
      }
      out << acc.x() << " " << acc.y() << " 0\n";
    }
  }
}

}  // namespace osmium
