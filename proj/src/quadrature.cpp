#include "c1free/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "c1free/polynomials.hpp"

namespace c1free {

namespace {

QuadratureRule collapsed_gauss(int dim, int exactness) {
  const int n = std::max(1, (exactness + 2) / 2);
  QuadratureRule rule;
  rule.dim = dim;
  rule.exactness = exactness;
  if (dim == 1) {
    const auto g = gauss_jacobi(n, 0.0, 0.0);
    rule.points.resize(1, n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
      rule.points(0, i) = 0.5 * (1.0 + g.points[i]);
      rule.weights[i] = 0.5 * g.weights[i];
    }
  } else if (dim == 2) {
    const auto ga = gauss_jacobi(n, 0.0, 0.0);
    const auto gb = gauss_jacobi(n, 1.0, 0.0);
    rule.points.resize(2, n * n);
    rule.weights.resize(n * n);
    int q = 0;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i, ++q) {
        const double a = ga.points[i], b = gb.points[j];
        rule.points(1, q) = 0.5 * (1.0 + b);
        rule.points(0, q) = 0.25 * (1.0 + a) * (1.0 - b);
        rule.weights[q] = ga.weights[i] * gb.weights[j] / 8.0;
      }
    }
  } else {
    const auto ga = gauss_jacobi(n, 0.0, 0.0);
    const auto gb = gauss_jacobi(n, 1.0, 0.0);
    const auto gc = gauss_jacobi(n, 2.0, 0.0);
    rule.points.resize(3, n * n * n);
    rule.weights.resize(n * n * n);
    int q = 0;
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i, ++q) {
          const double a = ga.points[i], b = gb.points[j], c = gc.points[k];
          rule.points(2, q) = 0.5 * (1.0 + c);
          rule.points(1, q) = 0.25 * (1.0 + b) * (1.0 - c);
          rule.points(0, q) = 0.125 * (1.0 + a) * (1.0 - b) * (1.0 - c);
          rule.weights[q] = ga.weights[i] * gb.weights[j] * gc.weights[k] / 64.0;
        }
      }
    }
  }
  return rule;
}

// Grundmann & Moller, SIAM J. Numer. Anal. 15 (1978), Theorem 4.
QuadratureRule grundmann_moller(int dim, int exactness) {
  const int s = std::max(0, exactness / 2);  // degree 2s+1 >= exactness
  const int d = 2 * s + 1;
  std::vector<double> factorial(d + dim + 2, 1.0);
  for (std::size_t i = 1; i < factorial.size(); ++i) factorial[i] = factorial[i - 1] * static_cast<double>(i);

  std::vector<double> pts;
  std::vector<double> wts;
  for (int i = 0; i <= s; ++i) {
    const double denom = d + dim - 2 * i;
    double w = std::pow(2.0, -2 * s) * std::pow(denom, d) / (factorial[i] * factorial[d + dim - i]);
    if (i % 2) w = -w;
    // all beta in N^{dim+1} with |beta| = s - i; coordinates use beta_1..beta_dim
    std::vector<int> beta(dim + 1, 0);
    auto emit = [&](auto&& self, int slot, int remaining) -> void {
      if (slot == dim) {
        beta[dim] = remaining;
        for (int c = 1; c <= dim; ++c) pts.push_back((2.0 * beta[c] + 1.0) / denom);
        wts.push_back(w);
        return;
      }
      for (int b = remaining; b >= 0; --b) {
        beta[slot] = b;
        self(self, slot + 1, remaining - b);
      }
    };
    emit(emit, 0, s - i);
  }
  QuadratureRule rule;
  rule.dim = dim;
  rule.exactness = d;
  const int n = static_cast<int>(wts.size());
  rule.points.resize(dim, n);
  rule.weights.resize(n);
  for (int q = 0; q < n; ++q) {
    for (int c = 0; c < dim; ++c) rule.points(c, q) = pts[static_cast<std::size_t>(q * dim + c)];
    rule.weights[q] = wts[static_cast<std::size_t>(q)];
  }
  return rule;
}

}  // namespace

double reference_measure(int dim) {
  double f = 1.0;
  for (int i = 2; i <= dim; ++i) f *= i;
  return 1.0 / f;
}

QuadratureRule simplex_rule(int dim, int exactness, QuadratureFamily family) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("simplex_rule: dim must be 1, 2 or 3");
  const int cap = dim == 3 ? kMaxExactness3D : kMaxExactness2D;
  if (exactness < 0 || exactness > cap) {
    throw std::invalid_argument("simplex_rule: exactness " + std::to_string(exactness) +
                                " outside supported range [0, " + std::to_string(cap) + "] for dim " +
                                std::to_string(dim));
  }
  if (family == QuadratureFamily::GrundmannMoller) return grundmann_moller(dim, exactness);
  return collapsed_gauss(dim, exactness);
}

}  // namespace c1free
