#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "osmium/elements.hpp"
#include "osmium/mesh.hpp"
#include "osmium/quadrature.hpp"

namespace osmium {

// Continuous scalar Lagrange space of degree 1..3.
struct LagrangeSpace {
  int degree = 1;
  int ndofs = 0;
  struct CellDof {
    int gdof;
    LagNode node;
  };
  std::vector<std::vector<CellDof>> cells;
  std::vector<char> on_boundary;  // per dof

  // basis tables at barycentric points (rows: local dofs, cols: points)
  void eval(const Mesh2D& mesh, int cell, const std::vector<std::array<double, 3>>& pts,
            Eigen::MatrixXd& val, Eigen::MatrixXd& dx, Eigen::MatrixXd& dy) const;
};

// Discontinuous scalars of degree 0 or 1 (per-cell dofs).
struct DGSpace {
  int degree = 0;
  int ndofs = 0;
  int per_cell = 1;
  int cell_dof(int cell, int k) const { return cell * per_cell + k; }
  void eval(const Mesh2D& mesh, int cell, const std::vector<std::array<double, 3>>& pts,
            Eigen::MatrixXd& val) const;
};

// H(div)-conforming Raviart-Thomas space; order 1 has one dof per edge, order
// 2 adds a second edge moment and two interior dofs per cell.
struct RTSpace {
  int order = 1;
  int ndofs = 0;
  int edge_dofs = 0;  // = order
  int interior_offset = 0;
  std::vector<RTCellBasis> bases;  // per cell
  std::vector<char> on_boundary;   // per dof

  int edge_dof(int edge, int m) const { return edge * edge_dofs + m; }
  int interior_dof(int cell, int c) const { return interior_offset + 2 * cell + c; }
  std::vector<int> cell_dofs(const Mesh2D& mesh, int cell) const;
};

// The mixed discretization bundle: Taylor-Hood (k+1, k) velocities/pressures,
// RT_k fluxes with DG_{k-1} scalars, continuous P1 reconstruction target.
struct SpaceSetup {
  const Mesh2D* mesh = nullptr;
  int order = 1;
  LagrangeSpace velocity;  // scalar component space, degree k+1
  LagrangeSpace pressure;  // degree k
  LagrangeSpace recon;     // degree 1
  DGSpace scalar;          // degree k-1
  RTSpace flux;
  int quad_degree = 0;
  std::vector<QuadPoint2D> cell_rule;
  std::vector<QuadPoint1D> edge_rule_pts;
};

LagrangeSpace build_lagrange(const Mesh2D& mesh, int degree);
DGSpace build_dg(const Mesh2D& mesh, int degree);
RTSpace build_rt(const Mesh2D& mesh, int order);
SpaceSetup build_spaces(const Mesh2D& mesh, int order, int quad_degree = -1);

}  // namespace osmium
