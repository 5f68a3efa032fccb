#pragma once

#include <Eigen/Dense>
#include <vector>

namespace osmium {

struct QuadPoint1D {
  double t;  // in [0,1]
  double w;
};

struct QuadPoint2D {
  double x, y;  // reference triangle {x,y>=0, x+y<=1}
  double w;
};

// Gauss-Legendre rule on [0,1], exact for degree 2m-1.
std::vector<QuadPoint1D> gauss_legendre(int m);

// Conical-product rule on the reference triangle, exact for total degree
// `degree`; weights are positive and sum to 1/2.
std::vector<QuadPoint2D> triangle_rule(int degree);

// Edge rule exact for degree `degree`.
std::vector<QuadPoint1D> edge_rule(int degree);

// Exact integral of x^a y^b over the reference triangle: a! b! / (a+b+2)!.
double triangle_monomial_integral(int a, int b);

}  // namespace osmium
