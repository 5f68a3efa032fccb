#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <map>
#include <vector>

#include "osmium/spaces.hpp"

namespace osmium {

using ScalarFn = std::function<double(const Eigen::Vector2d&)>;
using VectorFn = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;

Eigen::Vector2d lagrange_node_position(const Mesh2D& mesh, int cell, const LagNode& node);

Eigen::VectorXd interpolate_lagrange(const Mesh2D& mesh, const LagrangeSpace& sp,
                                     const ScalarFn& f);
// DG0: cell means; DG1: vertex values per cell.
Eigen::VectorXd interpolate_dg(const Mesh2D& mesh, const DGSpace& sp, const ScalarFn& f);
// RT: edge moments of f.n against the oriented Legendre basis plus interior
// moments, matching the dof functionals.
Eigen::VectorXd interpolate_rt(const Mesh2D& mesh, const RTSpace& sp, const VectorFn& f);

Eigen::SparseMatrix<double> assemble_mass_matrix(const Mesh2D& mesh, const LagrangeSpace& sp,
                                                 const ScalarFn& coeff, int quad_degree);

// L2(Omega) projection of a DG field onto the continuous P1 space.
Eigen::VectorXd reconstruct(const Mesh2D& mesh, const LagrangeSpace& recon, const DGSpace& dg,
                            const Eigen::VectorXd& dg_coeffs);

// Pointwise normalization x_i / (nu_Z . x): values is (s x npts).
Eigen::MatrixXd normalize_mole_fractions(const Eigen::MatrixXd& values,
                                         const Eigen::VectorXd& nu_Z);

// L2(Gamma) projections onto discrete trace spaces over the given tags.
// Flux version returns the normal-trace dofs; velocity version returns the
// projected nodal values per boundary scalar dof.
std::map<int, double> trace_project_flux(const Mesh2D& mesh, const RTSpace& sp,
                                         const std::vector<int>& tags,
                                         const std::function<double(const Eigen::Vector2d&)>& g,
                                         int quad_degree = 8);
std::map<int, Eigen::Vector2d> trace_project_velocity(const Mesh2D& mesh,
                                                      const LagrangeSpace& sp,
                                                      const std::vector<int>& tags,
                                                      const VectorFn& g, int quad_degree = 8);

// Quadrature point on a boundary facet with cell-side barycentric coordinates
// and the position along the globally oriented edge.
struct EdgeQP {
  Eigen::Vector2d p;
  std::array<double, 3> bary;
  double w;         // includes the edge length
  double s_global;  // arclength fraction from the edge's low to high vertex
};
std::vector<EdgeQP> facet_quadrature(const Mesh2D& mesh, const Mesh2D::BoundaryFacet& bf,
                                     const std::vector<QuadPoint1D>& rule);

std::vector<std::array<double, 3>> cell_rule_bary(const std::vector<QuadPoint2D>& rule);

}  // namespace osmium
