#include "c1free/polynomials.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace c1free {

GaussRule1D gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi: need at least one point");
  const double ab = alpha + beta;
  // Jacobi matrix of the monic recurrence.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * k + ab;
    if (k == 0) {
      J(0, 0) = (beta - alpha) / (ab + 2.0);
    } else {
      J(k, k) = (beta * beta - alpha * alpha) / (t * (t + 2.0));
    }
    if (k + 1 < n) {
      const double k1 = k + 1.0;
      const double t1 = 2.0 * k1 + ab;
      const double b = 4.0 * k1 * (k1 + alpha) * (k1 + beta) * (k1 + ab) / (t1 * t1 * (t1 + 1.0) * (t1 - 1.0));
      J(k, k + 1) = J(k + 1, k) = std::sqrt(b);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
                     std::tgamma(ab + 2.0);
  GaussRule1D rule;
  rule.points = es.eigenvalues();
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  // Polish the nodes with Newton on P_n; the eigen solve alone loses a few digits for large n.
  for (int i = 0; i < n; ++i) {
    double x = rule.points[i];
    for (int it = 0; it < 3; ++it) {
      const double p = jacobi(n, alpha, beta, x);
      const double dp = 0.5 * (n + ab + 1.0) * jacobi(n - 1, alpha + 1.0, beta + 1.0, x);
      if (dp == 0.0) break;
      x -= p / dp;
    }
    rule.points[i] = x;
  }
  return rule;
}

Eigen::VectorXd gauss_lobatto_points(int n) {
  if (n < 1) throw std::invalid_argument("gauss_lobatto_points: n must be >= 1");
  Eigen::VectorXd x(n + 1);
  x[0] = -1.0;
  x[n] = 1.0;
  if (n > 1) {
    const auto inner = gauss_jacobi(n - 1, 1.0, 1.0);
    for (int i = 0; i < n - 1; ++i) x[i + 1] = inner.points[i];
  }
  return x;
}

double jacobi(int n, double alpha, double beta, double x) {
  if (n < 0) return 0.0;
  double p0 = 1.0;
  if (n == 0) return p0;
  double p1 = 0.5 * (alpha - beta + (alpha + beta + 2.0) * x);
  for (int k = 2; k <= n; ++k) {
    const double ab = alpha + beta;
    const double a1 = 2.0 * k * (k + ab) * (2.0 * k + ab - 2.0);
    const double a2 = (2.0 * k + ab - 1.0) * (alpha * alpha - beta * beta);
    const double a3 = (2.0 * k + ab - 2.0) * (2.0 * k + ab - 1.0) * (2.0 * k + ab);
    const double a4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * (2.0 * k + ab);
    const double p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

}  // namespace c1free
