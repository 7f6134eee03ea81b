#include "c1free/linalg.hpp"

#include <cholmod.h>
#include <umfpack.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

namespace c1free {

namespace {

// Backend pivot-ratio estimates below this are treated as singular.
constexpr double kSingularRcond = 10.0 * std::numeric_limits<double>::epsilon();

bool numerically_symmetric(const SparseMatrix& A) {
  if (A.rows() != A.cols()) return false;
  const SparseMatrix At = A.transpose();
  const double scale = A.coeffs().size() ? A.coeffs().cwiseAbs().maxCoeff() : 0.0;
  if (scale == 0.0) return true;
  const SparseMatrix diff = A - At;
  return diff.nonZeros() == 0 || diff.coeffs().cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

std::string format_rcond(double r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

}  // namespace

struct Factorization::Impl {
  FactorKind kind = FactorKind::LU;
  int n = 0;
  double rcond = 0.0;
  mutable std::mutex mutex;

  // CHOLMOD state
  cholmod_common common{};
  bool common_started = false;
  cholmod_factor* L = nullptr;

  // UMFPACK state, which needs the matrix again at solve time
  SparseMatrix A;
  void* numeric = nullptr;
  double control[UMFPACK_CONTROL];

  ~Impl() {
    if (L) cholmod_free_factor(&L, &common);
    if (common_started) cholmod_finish(&common);
    if (numeric) umfpack_di_free_numeric(&numeric);
  }

  // Returns false if the matrix is not positive definite or looks singular.
  bool try_cholesky(const SparseMatrix& M) {
    cholmod_start(&common);
    common_started = true;
    common.print = 0;
    common.supernodal = CHOLMOD_SUPERNODAL;
    cholmod_sparse view{};
    view.nrow = static_cast<std::size_t>(M.rows());
    view.ncol = static_cast<std::size_t>(M.cols());
    view.nzmax = static_cast<std::size_t>(M.nonZeros());
    view.p = const_cast<int*>(M.outerIndexPtr());
    view.i = const_cast<int*>(M.innerIndexPtr());
    view.x = const_cast<double*>(M.valuePtr());
    view.stype = -1;
    view.itype = CHOLMOD_INT;
    view.xtype = CHOLMOD_REAL;
    view.dtype = CHOLMOD_DOUBLE;
    view.sorted = 1;
    view.packed = 1;
    L = cholmod_analyze(&view, &common);
    if (!L) throw std::runtime_error("symbolic analysis (CHOLMOD) failed with status " + std::to_string(common.status));
    const int ok = cholmod_factorize(&view, L, &common);
    if (!ok || common.status == CHOLMOD_NOT_POSDEF || L->minor < L->n) return false;
    rcond = cholmod_rcond(L, &common);
    return rcond > kSingularRcond;
  }

  void lu(const SparseMatrix& M) {
    A = M;
    A.makeCompressed();
    umfpack_di_defaults(control);
    control[UMFPACK_PRL] = 0;
    double info[UMFPACK_INFO];
    void* symbolic = nullptr;
    int status = umfpack_di_symbolic(n, n, A.outerIndexPtr(), A.innerIndexPtr(), A.valuePtr(), &symbolic, control, info);
    if (status != UMFPACK_OK) {
      throw std::runtime_error("symbolic analysis (UMFPACK) failed with status " + std::to_string(status));
    }
    status = umfpack_di_numeric(A.outerIndexPtr(), A.innerIndexPtr(), A.valuePtr(), symbolic, &numeric, control, info);
    umfpack_di_free_symbolic(&symbolic);
    rcond = info[UMFPACK_RCOND];
    if (status == UMFPACK_WARNING_singular_matrix || (status == UMFPACK_OK && !(rcond > kSingularRcond))) {
      throw SingularMatrixError("numeric factorization (UMFPACK LU): matrix is singular, pivot ratio " +
                                format_rcond(rcond));
    }
    if (status != UMFPACK_OK) {
      throw std::runtime_error("numeric factorization (UMFPACK LU) failed with status " + std::to_string(status));
    }
  }
};

Factorization::Factorization(const SparseMatrix& A, bool symmetric_hint) : impl_(std::make_unique<Impl>()) {
  if (A.rows() != A.cols()) throw std::invalid_argument("factorize: matrix is not square");
  impl_->n = static_cast<int>(A.rows());
  if (impl_->n == 0) {
    impl_->kind = FactorKind::LU;
    impl_->rcond = 1.0;
    return;
  }
  SparseMatrix M = A;
  M.makeCompressed();
  if (symmetric_hint && numerically_symmetric(M)) {
    if (impl_->try_cholesky(M)) {
      impl_->kind = FactorKind::Cholesky;
      return;
    }
    if (impl_->L) cholmod_free_factor(&impl_->L, &impl_->common);
  }
  impl_->kind = FactorKind::LU;
  impl_->lu(M);
}

Factorization::~Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;

FactorKind Factorization::kind() const { return impl_->kind; }
int Factorization::rows() const { return impl_->n; }
double Factorization::rcond() const { return impl_->rcond; }

Eigen::VectorXd Factorization::solve(const Eigen::VectorXd& b) const {
  Impl& im = *impl_;
  if (b.size() != im.n) throw std::invalid_argument("solve: right-hand side length mismatch");
  if (im.n == 0) return b;
  std::lock_guard lock(im.mutex);
  Eigen::VectorXd x(im.n);
  if (im.kind == FactorKind::Cholesky) {
    cholmod_dense rhs{};
    rhs.nrow = static_cast<std::size_t>(im.n);
    rhs.ncol = 1;
    rhs.nzmax = rhs.nrow;
    rhs.d = rhs.nrow;
    rhs.x = const_cast<double*>(b.data());
    rhs.xtype = CHOLMOD_REAL;
    rhs.dtype = CHOLMOD_DOUBLE;
    cholmod_dense* sol = cholmod_solve(CHOLMOD_A, im.L, &rhs, &im.common);
    if (!sol) throw std::runtime_error("triangular solve (CHOLMOD) failed");
    x = Eigen::Map<const Eigen::VectorXd>(static_cast<const double*>(sol->x), im.n);
    cholmod_free_dense(&sol, &im.common);
  } else {
    double info[UMFPACK_INFO];
    const int status = umfpack_di_solve(UMFPACK_A, im.A.outerIndexPtr(), im.A.innerIndexPtr(), im.A.valuePtr(), x.data(),
                                        b.data(), im.numeric, im.control, info);
    if (status != UMFPACK_OK) throw std::runtime_error("triangular solve (UMFPACK) failed with status " + std::to_string(status));
  }
  return x;
}

Factorization factorize(const SparseMatrix& A, bool symmetric_hint) { return Factorization(A, symmetric_hint); }

double NullspaceResult::gap() const {
  if (last_kept == 0.0 || first_discarded == 0.0) return std::numeric_limits<double>::infinity();
  return last_kept / first_discarded;
}

NullspaceResult dense_nullspace(const Eigen::MatrixXd& A, double rtol, double scale) {
  NullspaceResult out;
  const auto n = A.cols();
  if (n == 0) return out;
  if (A.rows() == 0) {
    out.basis = Eigen::MatrixXd::Identity(n, n);
    return out;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  out.singular_values = svd.singularValues();
  out.sigma_max = out.singular_values.size() ? out.singular_values[0] : 0.0;
  const double threshold = rtol * std::max(out.sigma_max, scale);
  int rank = 0;
  for (Eigen::Index k = 0; k < out.singular_values.size(); ++k)
    if (out.singular_values[k] > threshold) ++rank;
  out.rank = rank;
  if (rank > 0) out.last_kept = out.singular_values[rank - 1];
  if (rank < out.singular_values.size()) out.first_discarded = out.singular_values[rank];
  out.basis = svd.matrixV().rightCols(n - rank);
  return out;
}

}  // namespace c1free
