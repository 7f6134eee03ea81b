#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "c1free/assembly.hpp"
#include "c1free/fespace.hpp"
#include "c1free/linalg.hpp"

namespace c1free {

/// [[theta, eta]] = mass * (theta, eta) + curl * (curl theta, curl eta).
struct InnerProductWeights {
  double mass = 1.0;
  double curl = 1.0;
};

/// Scalar space W (degree p) and vector space G (degree p - 1) on one mesh with their constraints.
struct MixedSpaces {
  std::shared_ptr<const LagrangeSpace> scalar;
  std::shared_ptr<const LagrangeSpace> vector;
  ConstraintSet scalar_constraints;
  ConstraintSet vector_constraints;

  int num_scalar_free() const { return scalar_constraints.num_free(); }
  int num_vector_free() const { return vector_constraints.num_free(); }
};

/// Spaces of degree p and p - 1 with the boundary constraints of the mesh tags.
MixedSpaces build_mixed_spaces(std::shared_ptr<const SimplicialMesh> mesh, int p);

/// Evaluates [[grad w - gamma]] by quadrature of the fields themselves. Forming x^T P x instead
/// loses about half the digits to cancellation once the residual drops below sqrt(eps) * |x|.
class XiNormEvaluator {
 public:
  XiNormEvaluator(const LagrangeSpace& scalar, const LagrangeSpace& vector, InnerProductWeights weights);

  /// Full coefficient vectors in, [[grad w - gamma, grad w - gamma]]^(1/2) out.
  double norm(const Eigen::VectorXd& w, const Eigen::VectorXd& gamma) const;
  /// The two parts ||grad w - gamma||_{L2} and ||curl gamma||_{L2}.
  std::pair<double, double> parts(const Eigen::VectorXd& w, const Eigen::VectorXd& gamma) const;

 private:
  const LagrangeSpace& scalar_;
  const LagrangeSpace& vector_;
  InnerProductWeights weights_;
  Eigen::VectorXd qweights_;
  std::vector<Eigen::MatrixXd> scalar_grad_;  // reference gradients, points x basis
  BasisTableau vector_tab_;
};

/// Block system over x = [w free dofs; gamma free dofs].
///
/// A = blockdiag(C, Agg) carries c(.,.) and a(.,.); P is the Gram operator of
/// Xi(w, gamma) = grad w - gamma under [[.,.]]:
///   P = mass * [[K, -G], [-G^T, M]] + curl * [[0, 0], [0, R]],
/// with K the scalar stiffness, G(i, j) = (psi_j, grad v_i), M the vector mass and R the curl-curl
/// matrix, all constraint reduced.
struct PenaltySystem {
  MixedSpaces spaces;
  InnerProductWeights weights;
  SparseMatrix K, G, M, R;   ///< reduced Gram blocks
  SparseMatrix C, Agg;       ///< reduced c- and a-form matrices
  SparseMatrix A, P;         ///< assembled block operators
  Eigen::VectorXd F;         ///< [F2; F1], reduced
  bool symmetric = true;
  std::shared_ptr<const XiNormEvaluator> xi_norm;

  int num_scalar() const { return static_cast<int>(K.rows()); }
  int num_vector() const { return static_cast<int>(M.rows()); }
  int size() const { return num_scalar() + num_vector(); }

  /// Full coefficient vectors of the w and gamma blocks of x.
  Eigen::VectorXd scalar_field(const Eigen::VectorXd& x) const;
  Eigen::VectorXd vector_field(const Eigen::VectorXd& x) const;
  /// Reduced right-hand side [Zs^T f2; Zv^T f1] from full vectors.
  Eigen::VectorXd reduce_rhs(const Eigen::VectorXd& f2, const Eigen::VectorXd& f1) const;
};

/// Assemble the penalty system. a_form acts on the vector space, c_form on the scalar space; either
/// may be empty. f2 (scalar) and f1 (vector) are full, unreduced load vectors; empty means zero.
/// Throws std::invalid_argument if both weights vanish or are negative.
PenaltySystem build_penalty_system(const MixedSpaces& spaces, const FormSum& a_form, const FormSum& c_form,
                                   const Eigen::VectorXd& f2, const Eigen::VectorXd& f1,
                                   InnerProductWeights weights = {});

struct SolveReport {
  Eigen::VectorXd x;           ///< last iterate, reduced [w; gamma]
  Eigen::VectorXd w;           ///< full scalar coefficients
  Eigen::VectorXd gamma;       ///< full vector coefficients
  Eigen::VectorXd multiplier;  ///< accumulated y, reduced
  std::vector<double> residuals;
  int iterations = 0;          ///< number of solves performed
  bool converged = false;
  double factor_ms = 0.0;
  double solve_ms = 0.0;
  double total_ms = 0.0;

  double final_residual() const { return residuals.empty() ? 0.0 : residuals.back(); }
};

struct PenaltyOptions {
  double lambda = 1e3;
  double tol = 1e-8;
  int max_iter = 100;
};

/// Factor A + lambda P once and iterate for any number of right-hand sides.
class IteratedPenaltySolver {
 public:
  IteratedPenaltySolver(const PenaltySystem& system, double lambda);

  /// (A + lambda P) x^n = F - P y^n, y^{n+1} = y^n + lambda x^n, until sqrt(x^T P x) < tol.
  SolveReport solve(const Eigen::VectorXd& F, double tol, int max_iter,
                    const std::optional<Eigen::VectorXd>& y0 = std::nullopt) const;

  double lambda() const { return lambda_; }
  double factor_ms() const { return factor_ms_; }
  const Factorization& factorization() const { return factor_; }

 private:
  const PenaltySystem& system_;
  double lambda_;
  double factor_ms_ = 0.0;
  Factorization factor_;
};

SolveReport iterated_penalty_solve(const PenaltySystem& system, const PenaltyOptions& options,
                                   const std::optional<Eigen::VectorXd>& y0 = std::nullopt);

/// sqrt(x^T P x) = [[Xi(w, gamma)]] for the fields encoded by x, evaluated by quadrature.
double residual_norm(const PenaltySystem& system, const Eigen::VectorXd& x);

}  // namespace c1free
