#pragma once

#include <Eigen/Dense>

namespace c1free {

/// Gauss-Jacobi points and weights on [-1, 1] for the weight (1-x)^alpha (1+x)^beta.
struct GaussRule1D {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;
};

/// n-point Gauss-Jacobi rule (exact for degree 2n-1), computed by Golub-Welsch.
GaussRule1D gauss_jacobi(int n, double alpha, double beta);

/// Gauss-Lobatto-Legendre points on [-1, 1], ascending, n+1 points (n >= 1).
Eigen::VectorXd gauss_lobatto_points(int n);

/// Jacobi polynomial P_n^{(alpha,beta)}(x).
double jacobi(int n, double alpha, double beta, double x);

}  // namespace c1free
