#pragma once

#include <Eigen/Dense>

namespace c1free {

enum class QuadratureFamily {
  CollapsedGauss,   ///< Gauss-Jacobi products in collapsed coordinates; positive weights.
  GrundmannMoller,  ///< Grundmann-Moller closed form; signed weights, odd exactness.
};

/// Integration rule on the reference simplex {x_i >= 0, sum x_i <= 1}.
struct QuadratureRule {
  int dim = 0;
  Eigen::MatrixXd points;  ///< dim x n reference coordinates
  Eigen::VectorXd weights; ///< sums to 1/dim!
  int exactness = 0;

  int size() const { return static_cast<int>(weights.size()); }
};

inline constexpr int kMaxExactness2D = 48;
inline constexpr int kMaxExactness3D = 30;

/// Rule integrating every polynomial of total degree <= exactness exactly.
/// dim = 1 gives Gauss-Legendre on [0, 1]. Throws std::invalid_argument beyond the supported range.
QuadratureRule simplex_rule(int dim, int exactness,
                            QuadratureFamily family = QuadratureFamily::CollapsedGauss);

/// Measure of the reference simplex, 1/dim!.
double reference_measure(int dim);

}  // namespace c1free
