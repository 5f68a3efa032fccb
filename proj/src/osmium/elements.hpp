#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "osmium/mesh.hpp"
#include "osmium/quadrature.hpp"

namespace osmium {

// Lagrange node on a triangle, expressed through barycentric coordinates so
// that shared-edge nodes evaluate identically from both cells.
struct LagNode {
  enum Type { Vertex, EdgeMid, EdgeThird, Interior };
  Type type = Vertex;
  int i = 0, j = 0;  // local vertex indices; EdgeThird sits at 2/3 i + 1/3 j
};

double lagrange_value(int degree, const LagNode& node, const double l[3]);
Eigen::Vector2d lagrange_grad(int degree, const LagNode& node, const double l[3],
                              const std::array<Eigen::Vector2d, 3>& gl);

// Raviart-Thomas local basis on one physical cell; order 1 pairs constants per
// edge (3 dofs), order 2 adds linear edge moments and two interior moments
// (8 dofs). Basis is nodal with respect to scaled edge-moment and interior
// functionals taken with globally oriented edge normals.
class RTCellBasis {
 public:
  RTCellBasis(const Mesh2D& mesh, int cell, int order);

  int ndofs() const { return nd_; }
  // local dof layout: [edge0 (order moments), edge1, edge2, interior x, interior y]
  void eval(const Eigen::Vector2d& p, Eigen::Matrix2Xd& values, Eigen::VectorXd& divs) const;

 private:
  int order_, nd_;
  Eigen::Vector2d xc_;
  double h_ = 1.0;
  Eigen::MatrixXd C_;  // coefficients: phi_i = sum_j C(j,i) mono_j

  int nmono() const { return nd_; }
  void mono_eval(const Eigen::Vector2d& p, Eigen::Matrix2Xd& m, Eigen::VectorXd& dv) const;
};

}  // namespace osmium
