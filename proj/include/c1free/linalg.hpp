#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "c1free/fespace.hpp"

namespace c1free {

/// Raised when a factorization detects a (numerically) singular matrix.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FactorKind { Cholesky, LU };

/// Sparse direct factorization: supernodal Cholesky (CHOLMOD) for symmetric positive definite
/// input, LU (UMFPACK) otherwise. With symmetric_hint a failed Cholesky falls back to LU.
/// Solves are serialized internally, so a const Factorization may be shared between threads.
class Factorization {
 public:
  Factorization(const SparseMatrix& A, bool symmetric_hint);
  ~Factorization();
  Factorization(Factorization&&) noexcept;
  Factorization& operator=(Factorization&&) noexcept;
  Factorization(const Factorization&) = delete;
  Factorization& operator=(const Factorization&) = delete;

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

  FactorKind kind() const;
  int rows() const;
  /// Reciprocal condition estimate reported by the backend (cheap, diagonal based).
  double rcond() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Factorization factorize(const SparseMatrix& A, bool symmetric_hint);

struct NullspaceResult {
  Eigen::MatrixXd basis;          ///< orthonormal columns spanning the numerical nullspace
  Eigen::VectorXd singular_values;
  int rank = 0;
  double sigma_max = 0.0;
  double last_kept = 0.0;         ///< smallest singular value above the threshold (0 if none)
  double first_discarded = 0.0;   ///< largest singular value below the threshold (0 if none)

  int dimension() const { return static_cast<int>(basis.cols()); }
  /// last_kept / first_discarded; infinite if either side is empty or the discarded value is 0.
  double gap() const;
};

/// Singular values <= rtol * max(sigma_max, scale) count as zero. A positive scale (the norm of
/// the operator A was derived from) keeps a matrix of pure round-off from reporting full rank.
NullspaceResult dense_nullspace(const Eigen::MatrixXd& A, double rtol = 1e-9, double scale = 0.0);

}  // namespace c1free
