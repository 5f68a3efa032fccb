#include "osmium/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace osmium {

namespace {

// Golub-Welsch nodes/weights for a Jacobi weight (1-x)^alpha on [-1,1]
// (beta = 0 throughout).
void jacobi_rule(int m, double alpha, std::vector<double>& x, std::vector<double>& w) {
  const double beta = 0.0;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int k = 0; k < m; ++k) {
    double denom = (2.0 * k + alpha + beta) * (2.0 * k + alpha + beta + 2.0);
    double a = (k == 0) ? (beta - alpha) / (alpha + beta + 2.0)
                        : (beta * beta - alpha * alpha) / denom;
    J(k, k) = a;
    if (k + 1 < m) {
      int kk = k + 1;
      double num = 4.0 * kk * (kk + alpha) * (kk + beta) * (kk + alpha + beta);
      double den = std::pow(2.0 * kk + alpha + beta, 2) * (2.0 * kk + alpha + beta + 1.0) *
                   (2.0 * kk + alpha + beta - 1.0);
      double b = std::sqrt(num / den);
      J(k, k + 1) = b;
      J(k + 1, k) = b;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  // mu0 = integral of the weight over [-1,1]
  double mu0 = (alpha == 0.0) ? 2.0 : std::pow(2.0, alpha + 1.0) / (alpha + 1.0);
  x.resize(m);
  w.resize(m);
  for (int i = 0; i < m; ++i) {
    x[i] = es.eigenvalues()[i];
    double v0 = es.eigenvectors()(0, i);
    w[i] = mu0 * v0 * v0;
  }
}

}  // namespace

std::vector<QuadPoint1D> gauss_legendre(int m) {
  std::vector<double> x, w;
  jacobi_rule(m, 0.0, x, w);
  std::vector<QuadPoint1D> out(m);
  for (int i = 0; i < m; ++i) out[i] = {(x[i] + 1.0) / 2.0, w[i] / 2.0};
  return out;
}

std::vector<QuadPoint2D> triangle_rule(int degree) {
  const int m = degree / 2 + 1;  // 2m-1 >= degree
  auto gl = gauss_legendre(m);
  std::vector<double> xj, wj;
  jacobi_rule(m, 1.0, xj, wj);
  // Duffy map: (xi, eta) -> (xi (1-eta), eta), Jacobian (1-eta) absorbed by
  // the Jacobi weight.
  std::vector<QuadPoint2D> out;
  out.reserve(m * m);
  for (int j = 0; j < m; ++j) {
    double eta = (xj[j] + 1.0) / 2.0;
    double weta = wj[j] / 4.0;
    for (int i = 0; i < m; ++i) {
      out.push_back({gl[i].t * (1.0 - eta), eta, gl[i].w * weta});
    }
  }
  return out;
}

std::vector<QuadPoint1D> edge_rule(int degree) { return gauss_legendre(degree / 2 + 1); }

double triangle_monomial_integral(int a, int b) {
  // a! b! / (a+b+2)! computed stably
  double r = 1.0;
  for (int k = 1; k <= a + b + 2; ++k) r /= k;
  for (int k = 1; k <= a; ++k) r *= k;
  for (int k = 1; k <= b; ++k) r *= k;
  return r;
}

}  // namespace osmium
