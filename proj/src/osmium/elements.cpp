#include "osmium/elements.hpp"

#include "osmium/errors.hpp"

namespace osmium {

double lagrange_value(int degree, const LagNode& node, const double l[3]) {
  const double li = l[node.i], lj = l[node.j];
  switch (degree) {
    case 1:
      return li;
    case 2:
      if (node.type == LagNode::Vertex) return li * (2.0 * li - 1.0);
      return 4.0 * li * lj;
    case 3:
      switch (node.type) {
        case LagNode::Vertex:
          return 0.5 * li * (3.0 * li - 1.0) * (3.0 * li - 2.0);
        case LagNode::EdgeThird:
          return 4.5 * li * lj * (3.0 * li - 1.0);
        case LagNode::Interior:
          return 27.0 * l[0] * l[1] * l[2];
        default:
          break;
      }
      break;
    default:
      break;
  }
  fail(ErrorCode::UnsupportedOrder, "unsupported Lagrange node");
}

Eigen::Vector2d lagrange_grad(int degree, const LagNode& node, const double l[3],
                              const std::array<Eigen::Vector2d, 3>& gl) {
  const double li = l[node.i], lj = l[node.j];
  const Eigen::Vector2d gi = gl[node.i], gj = gl[node.j];
  switch (degree) {
    case 1:
      return gi;
    case 2:
      if (node.type == LagNode::Vertex) return (4.0 * li - 1.0) * gi;
      return 4.0 * (lj * gi + li * gj);
    case 3:
      switch (node.type) {
        case LagNode::Vertex:
          return 0.5 * (27.0 * li * li - 18.0 * li + 2.0) * gi;
        case LagNode::EdgeThird:
          return 4.5 * ((6.0 * li * lj - lj) * gi + (3.0 * li * li - li) * gj);
        case LagNode::Interior:
          return 27.0 * (l[1] * l[2] * gl[0] + l[0] * l[2] * gl[1] + l[0] * l[1] * gl[2]);
        default:
          break;
      }
      break;
    default:
      break;
  }
  fail(ErrorCode::UnsupportedOrder, "unsupported Lagrange node");
}

RTCellBasis::RTCellBasis(const Mesh2D& mesh, int cell, int order) : order_(order) {
  if (order != 1 && order != 2) fail(ErrorCode::UnsupportedOrder, "RT order must be 1 or 2");
  nd_ = (order == 1) ? 3 : 8;
  const auto& tri = mesh.tris[cell];
  xc_ = mesh.centroid(cell);
  h_ = 0.0;
  for (int e = 0; e < 3; ++e)
    h_ = std::max(h_, (mesh.vertices[tri[(e + 1) % 3]] - mesh.vertices[tri[(e + 2) % 3]]).norm());

  // generalized Vandermonde of the dof functionals applied to the monomials
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nd_, nd_);
  auto eq = edge_rule(7);
  Eigen::Matrix2Xd mv;
  Eigen::VectorXd dv;
  for (int le = 0; le < 3; ++le) {
    int ge = mesh.tri_edges[cell][le];
    const auto& ed = mesh.edges[ge];
    Eigen::Vector2d plo = mesh.vertices[ed.v0], phi = mesh.vertices[ed.v1];
    Eigen::Vector2d tv = phi - plo;
    double len = tv.norm();
    Eigen::Vector2d nrm(tv.y() / len, -tv.x() / len);
    for (const auto& q : eq) {
      Eigen::Vector2d p = plo + q.t * tv;
      mono_eval(p, mv, dv);
      for (int j = 0; j < nd_; ++j) {
        double un = mv.col(j).dot(nrm);
        // functionals carry the 1/len normalization; q.w sums to one so the
        // arclength factor cancels
        G(le * order_ + 0, j) += q.w * un;
        if (order_ == 2) G(le * order_ + 1, j) += q.w * un * (2.0 * q.t - 1.0);
      }
    }
  }
  if (order_ == 2) {
    auto cq = triangle_rule(4);
    Eigen::Vector2d p0 = mesh.vertices[tri[0]];
    Eigen::Vector2d e1 = mesh.vertices[tri[1]] - p0;
    Eigen::Vector2d e2 = mesh.vertices[tri[2]] - p0;
    for (const auto& q : cq) {
      Eigen::Vector2d p = p0 + q.x * e1 + q.y * e2;
      mono_eval(p, mv, dv);
      // q.w sums to 1/2 = reference area; the physical-area factor cancels in
      // the (1/area) normalization
      for (int j = 0; j < nd_; ++j) {
        G(6, j) += 2.0 * q.w * mv(0, j);
        G(7, j) += 2.0 * q.w * mv(1, j);
      }
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
  if (!lu.isInvertible()) fail(ErrorCode::ConfigError, "RT Vandermonde is singular");
  C_ = lu.inverse();
}

void RTCellBasis::mono_eval(const Eigen::Vector2d& p, Eigen::Matrix2Xd& m,
                            Eigen::VectorXd& dv) const {
  const double u = (p.x() - xc_.x()) / h_;
  const double v = (p.y() - xc_.y()) / h_;
  m.resize(2, nd_);
  dv.resize(nd_);
  if (order_ == 1) {
    m.col(0) << 1.0, 0.0;
    m.col(1) << 0.0, 1.0;
    m.col(2) << u, v;
    dv << 0.0, 0.0, 2.0 / h_;
  } else {
    m.col(0) << 1.0, 0.0;
    m.col(1) << 0.0, 1.0;
    m.col(2) << u, 0.0;
    m.col(3) << v, 0.0;
    m.col(4) << 0.0, u;
    m.col(5) << 0.0, v;
    m.col(6) << u * u, u * v;
    m.col(7) << u * v, v * v;
    dv << 0.0, 0.0, 1.0 / h_, 0.0, 0.0, 1.0 / h_, 3.0 * u / h_, 3.0 * v / h_;
  }
}

void RTCellBasis::eval(const Eigen::Vector2d& p, Eigen::Matrix2Xd& values,
                       Eigen::VectorXd& divs) const {
  Eigen::Matrix2Xd mv;
  Eigen::VectorXd dv;
  mono_eval(p, mv, dv);
  values.noalias() = mv * C_;
  divs.noalias() = C_.transpose() * dv;
}

}  // namespace osmium
