#include "c1free/ipsolver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "c1free/quadrature.hpp"

namespace c1free {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void append_block(std::vector<Eigen::Triplet<double, int>>& trips, const SparseMatrix& B, int r0, int c0,
                  double scale) {
  if (scale == 0.0) return;
  for (int k = 0; k < B.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(B, k); it; ++it) trips.emplace_back(r0 + it.row(), c0 + it.col(), scale * it.value());
}

bool symmetric_form(const FormSum& form) {
  for (const FormTerm& t : form)
    if (!is_symmetric(t.kind)) return false;
  return true;
}

double checked_lambda(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("penalty parameter must be positive");
  return lambda;
}

Factorization timed_factorize(const SparseMatrix& M, bool symmetric, double& ms) {
  const auto t0 = Clock::now();
  Factorization f(M, symmetric);
  ms = ms_since(t0);
  return f;
}

}  // namespace

XiNormEvaluator::XiNormEvaluator(const LagrangeSpace& scalar, const LagrangeSpace& vector, InnerProductWeights weights)
    : scalar_(scalar), vector_(vector), weights_(weights) {
  const QuadratureRule rule = simplex_rule(scalar.dim(), std::max(2 * scalar.degree(), 1));
  qweights_ = rule.weights;
  scalar_grad_ = scalar.basis().tabulate(rule.points, 1).gradients;
  vector_tab_ = vector.basis().tabulate(rule.points, 1);
}

std::pair<double, double> XiNormEvaluator::parts(const Eigen::VectorXd& w, const Eigen::VectorXd& gamma) const {
  const SimplicialMesh& mesh = scalar_.mesh();
  const int d = mesh.dim, vd = vector_.value_dim();
  double mismatch = 0.0, curl = 0.0;
  Eigen::MatrixXd gw(qweights_.size(), d);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geom = cell_geometry(mesh, c);
    const Eigen::VectorXd wl = scalar_.cell_coefficients(w, c);
    const Eigen::VectorXd gl = vector_.cell_coefficients(gamma, c);
    const Eigen::Map<const Eigen::MatrixXd> G(gl.data(), vd, vector_.nodes_per_cell());
    // reference gradient of w, then pushed forward: grad_x = J^{-T} grad_xi
    Eigen::MatrixXd gref(qweights_.size(), d);
    for (int a = 0; a < d; ++a) gref.col(a) = scalar_grad_[static_cast<std::size_t>(a)] * wl;
    gw = gref * geom.Jinv;
    const Eigen::MatrixXd gv = vector_tab_.values * G.transpose();
    const Eigen::VectorXd wq = qweights_ * std::abs(geom.detJ);
    mismatch += wq.dot((gw - gv).rowwise().squaredNorm());
    if (weights_.curl != 0.0) {
      // derivative tables of gamma: dG[k](q, i) = d gamma_i / d x_k
      std::vector<Eigen::MatrixXd> dref;
      for (int a = 0; a < d; ++a) dref.push_back(vector_tab_.gradients[static_cast<std::size_t>(a)] * G.transpose());
      auto dg = [&](int i, int k) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(qweights_.size());
        for (int a = 0; a < d; ++a) out += geom.Jinv(a, k) * dref[static_cast<std::size_t>(a)].col(i);
        return out;
      };
      if (d == 2) {
        curl += wq.dot((dg(1, 0) - dg(0, 1)).array().square().matrix());
      } else {
        curl += wq.dot((dg(2, 1) - dg(1, 2)).array().square().matrix());
        curl += wq.dot((dg(0, 2) - dg(2, 0)).array().square().matrix());
        curl += wq.dot((dg(1, 0) - dg(0, 1)).array().square().matrix());
      }
    }
  }
  return {std::sqrt(mismatch), std::sqrt(curl)};
}

double XiNormEvaluator::norm(const Eigen::VectorXd& w, const Eigen::VectorXd& gamma) const {
  const auto [m, c] = parts(w, gamma);
  return std::sqrt(weights_.mass * m * m + weights_.curl * c * c);
}

MixedSpaces build_mixed_spaces(std::shared_ptr<const SimplicialMesh> mesh, int p) {
  if (p < 1) throw std::invalid_argument("mixed spaces need p >= 1");
  MixedSpaces s;
  const int d = mesh->dim;
  s.scalar = std::make_shared<const LagrangeSpace>(mesh, p, 1);
  s.vector = std::make_shared<const LagrangeSpace>(mesh, p - 1, d);
  s.scalar_constraints = build_scalar_constraints(*s.scalar);
  s.vector_constraints = build_vector_constraints(*s.vector);
  return s;
}

Eigen::VectorXd PenaltySystem::scalar_field(const Eigen::VectorXd& x) const {
  return spaces.scalar_constraints.Z * x.head(num_scalar());
}

Eigen::VectorXd PenaltySystem::vector_field(const Eigen::VectorXd& x) const {
  return spaces.vector_constraints.Z * x.tail(num_vector());
}

Eigen::VectorXd PenaltySystem::reduce_rhs(const Eigen::VectorXd& f2, const Eigen::VectorXd& f1) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(size());
  if (f2.size()) out.head(num_scalar()) = apply_constraints(f2, spaces.scalar_constraints);
  if (f1.size()) out.tail(num_vector()) = apply_constraints(f1, spaces.vector_constraints);
  return out;
}

PenaltySystem build_penalty_system(const MixedSpaces& spaces, const FormSum& a_form, const FormSum& c_form,
                                   const Eigen::VectorXd& f2, const Eigen::VectorXd& f1, InnerProductWeights weights) {
  if (weights.mass < 0.0 || weights.curl < 0.0 || (weights.mass == 0.0 && weights.curl == 0.0)) {
    throw std::invalid_argument("inner product weights must be non-negative and not both zero");
  }
  const LagrangeSpace& W = *spaces.scalar;
  const LagrangeSpace& V = *spaces.vector;
  const ConstraintSet& zs = spaces.scalar_constraints;
  const ConstraintSet& zv = spaces.vector_constraints;
  PenaltySystem sys;
  sys.spaces = spaces;
  sys.weights = weights;
  sys.K = apply_constraints(assemble_form(FormKind::ScalarStiffness, W, W), zs, zs);
  sys.G = apply_constraints(assemble_form(FormKind::GradCoupling, V, W), zv, zs);
  sys.M = apply_constraints(assemble_form(FormKind::VectorMass, V, V), zv, zv);
  sys.R = weights.curl != 0.0 ? apply_constraints(assemble_form(FormKind::CurlCurl, V, V), zv, zv)
                              : SparseMatrix(zv.num_free(), zv.num_free());
  sys.C = apply_constraints(assemble_form(c_form, W, W), zs, zs);
  sys.Agg = apply_constraints(assemble_form(a_form, V, V), zv, zv);
  sys.symmetric = symmetric_form(a_form) && symmetric_form(c_form);

  const int ns = zs.num_free(), nv = zv.num_free(), n = ns + nv;
  std::vector<Eigen::Triplet<double, int>> trips;
  append_block(trips, sys.C, 0, 0, 1.0);
  append_block(trips, sys.Agg, ns, ns, 1.0);
  sys.A.resize(n, n);
  sys.A.setFromTriplets(trips.begin(), trips.end());
  trips.clear();
  const SparseMatrix Gt = sys.G.transpose();
  append_block(trips, sys.K, 0, 0, weights.mass);
  append_block(trips, sys.G, 0, ns, -weights.mass);
  append_block(trips, Gt, ns, 0, -weights.mass);
  append_block(trips, sys.M, ns, ns, weights.mass);
  append_block(trips, sys.R, ns, ns, weights.curl);
  sys.P.resize(n, n);
  sys.P.setFromTriplets(trips.begin(), trips.end());
  sys.A.makeCompressed();
  sys.P.makeCompressed();

  if (f2.size() && f2.size() != W.num_dofs()) throw std::invalid_argument("F2 length does not match the scalar space");
  if (f1.size() && f1.size() != V.num_dofs()) throw std::invalid_argument("F1 length does not match the vector space");
  sys.F = sys.reduce_rhs(f2, f1);
  sys.xi_norm = std::make_shared<const XiNormEvaluator>(*sys.spaces.scalar, *sys.spaces.vector, weights);
  return sys;
}

double residual_norm(const PenaltySystem& system, const Eigen::VectorXd& x) {
  if (x.size() != system.size()) throw std::invalid_argument("residual_norm: vector length mismatch");
  return system.xi_norm->norm(system.scalar_field(x), system.vector_field(x));
}

IteratedPenaltySolver::IteratedPenaltySolver(const PenaltySystem& system, double lambda)
    : system_(system),
      lambda_(checked_lambda(lambda)),
      factor_(timed_factorize(SparseMatrix(system.A + lambda * system.P), system.symmetric, factor_ms_)) {}

SolveReport IteratedPenaltySolver::solve(const Eigen::VectorXd& F, double tol, int max_iter,
                                         const std::optional<Eigen::VectorXd>& y0) const {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  if (F.size() != system_.size()) throw std::invalid_argument("right-hand side length mismatch");
  const auto t0 = Clock::now();
  SolveReport rep;
  rep.factor_ms = factor_ms_;
  Eigen::VectorXd y = y0 ? *y0 : Eigen::VectorXd::Zero(system_.size());
  if (y.size() != system_.size()) throw std::invalid_argument("initial multiplier length mismatch");
  Eigen::VectorXd Py = system_.P * y;
  for (int n = 0; n < max_iter; ++n) {
    rep.x = factor_.solve(F - Py);
    ++rep.iterations;
    const double r = residual_norm(system_, rep.x);
    rep.residuals.push_back(r);
    y += lambda_ * rep.x;
    Py += lambda_ * (system_.P * rep.x);
    if (r < tol) {
      rep.converged = true;
      break;
    }
  }
  rep.multiplier = std::move(y);
  rep.w = system_.scalar_field(rep.x);
  rep.gamma = system_.vector_field(rep.x);
  rep.solve_ms = ms_since(t0);
  rep.total_ms = rep.factor_ms + rep.solve_ms;
  return rep;
}

SolveReport iterated_penalty_solve(const PenaltySystem& system, const PenaltyOptions& options,
                                   const std::optional<Eigen::VectorXd>& y0) {
  const IteratedPenaltySolver solver(system, options.lambda);
  return solver.solve(system.F, options.tol, options.max_iter, y0);
}

}  // namespace c1free
