#include "c1free/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "c1free/polynomials.hpp"
#include "c1free/quadrature.hpp"

namespace c1free {

namespace {

struct SchurData {
  Eigen::MatrixXd T;  // M^{-1} G^T: reduced scalar coefficients -> L2 projection of the gradient
  NullspaceResult nullspace;
};

SchurData schur_nullspace(const PenaltySystem& sys, double rtol) {
  const int ns = sys.num_scalar();
  if (ns > kOracleMaxDofs) {
    throw std::invalid_argument("dense oracle limited to " + std::to_string(kOracleMaxDofs) + " scalar DOFs, got " +
                                std::to_string(ns));
  }
  const Eigen::MatrixXd K = Eigen::MatrixXd(sys.K);
  const Eigen::MatrixXd G = Eigen::MatrixXd(sys.G);
  const Eigen::MatrixXd M = Eigen::MatrixXd(sys.M);
  SchurData out;
  if (M.rows() > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success) throw std::runtime_error("oracle: vector mass matrix is not positive definite");
    out.T = llt.solve(G.transpose());
  } else {
    out.T = Eigen::MatrixXd::Zero(0, ns);
  }
  Eigen::MatrixXd S = K - G * out.T;
  S = 0.5 * (S + S.transpose()).eval();
  out.nullspace = dense_nullspace(S, rtol, K.norm());
  return out;
}

Eigen::MatrixXd facet_vertices(const SimplicialMesh& mesh, const MeshFacet& f) {
  Eigen::MatrixXd X(mesh.dim, mesh.dim);
  for (int k = 0; k < mesh.dim; ++k) X.col(k) = mesh.vertices.col(f.vertices[static_cast<std::size_t>(k)]);
  return X;
}

// Physical points x = X0 + sum_k xi_k (X_k - X0) for facet reference points xi ((dim-1) x n).
Eigen::MatrixXd facet_points(const Eigen::MatrixXd& X, const Eigen::MatrixXd& xi) {
  Eigen::MatrixXd out(X.rows(), xi.cols());
  for (Eigen::Index q = 0; q < xi.cols(); ++q) {
    Eigen::VectorXd x = X.col(0);
    for (Eigen::Index k = 0; k < xi.rows(); ++k) x += xi(k, q) * (X.col(k + 1) - X.col(0));
    out.col(q) = x;
  }
  return out;
}

// Unisolvent points for polynomials of degree p - 1 on a facet reference simplex.
Eigen::MatrixXd facet_sample_points(int dim, int p) {
  if (dim == 2) {
    const GaussRule1D g = gauss_jacobi(p, 0.0, 0.0);
    Eigen::MatrixXd xi(1, p);
    xi.row(0) = (g.points.array() + 1.0).matrix().transpose() / 2.0;
    return xi;
  }
  if (p - 1 == 0) return Eigen::MatrixXd::Constant(2, 1, 1.0 / 3.0);
  return reference_nodes(2, p - 1);
}

// Physical gradients (points x basis, one per direction) of the scalar basis of `space` in `cell`.
std::vector<Eigen::MatrixXd> basis_gradients(const LagrangeSpace& space, int cell, const Eigen::MatrixXd& phys) {
  const CellGeometry geom = cell_geometry(space.mesh(), cell);
  return to_physical(space.basis().tabulate(geom.to_reference(phys), 1), geom).gradients;
}

ErrorNorm sobolev(const LagrangeSpace& space, const Eigen::VectorXd& u, const ScalarFunction* exact, int order) {
  if (space.value_dim() != 1) throw std::invalid_argument("Sobolev norms are implemented for scalar fields");
  if (order < 0 || order > 2) throw std::invalid_argument("Sobolev order must be 0, 1 or 2");
  const SimplicialMesh& mesh = space.mesh();
  const int d = mesh.dim;
  const int cap = d == 2 ? kMaxExactness2D : kMaxExactness3D;
  const QuadratureRule rule = simplex_rule(d, std::min(2 * space.degree() + 2, cap));
  double err = 0.0, ref = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geom = cell_geometry(mesh, c);
    const BasisTableau f = eval_field(space, u, c, rule.points, order);
    const Eigen::MatrixXd x = geom.to_physical(rule.points);
    for (int q = 0; q < rule.size(); ++q) {
      const double wq = rule.weights[q] * std::abs(geom.detJ);
      double ev = f.values(q, 0), rv = 0.0;
      if (exact) {
        rv = exact->value(x.col(q));
        ev -= rv;
      }
      double e2 = ev * ev, r2 = rv * rv;
      if (order >= 1) {
        Eigen::VectorXd g(d);
        for (int k = 0; k < d; ++k) g[k] = f.gradients[static_cast<std::size_t>(k)](q, 0);
        Eigen::VectorXd gr = Eigen::VectorXd::Zero(d);
        if (exact) gr = exact->gradient(x.col(q));
        e2 += (g - gr).squaredNorm();
        r2 += gr.squaredNorm();
      }
      if (order >= 2) {
        Eigen::MatrixXd H(d, d);
        for (int k = 0; k < d * d; ++k) H(k / d, k % d) = f.hessians[static_cast<std::size_t>(k)](q, 0);
        Eigen::MatrixXd Hr = Eigen::MatrixXd::Zero(d, d);
        if (exact) Hr = exact->hessian(x.col(q));
        e2 += (H - Hr).squaredNorm();
        r2 += Hr.squaredNorm();
      }
      err += wq * e2;
      ref += wq * r2;
    }
  }
  ErrorNorm out;
  out.absolute = std::sqrt(err);
  out.relative = ref > 0.0 ? out.absolute / std::sqrt(ref) : (err > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  return out;
}

}  // namespace

OracleResult oracle_conforming_solve(const PenaltySystem& sys, double rtol) {
  const SchurData sd = schur_nullspace(sys, rtol);
  OracleResult out;
  out.nullspace = sd.nullspace;
  out.basis = sd.nullspace.basis;
  const int ns = sys.num_scalar(), nv = sys.num_vector();
  const Eigen::MatrixXd& N = out.basis;
  const Eigen::MatrixXd TN = sd.T * N;
  const Eigen::MatrixXd B = N.transpose() * (Eigen::MatrixXd(sys.C) * N) + TN.transpose() * (Eigen::MatrixXd(sys.Agg) * TN);
  const Eigen::VectorXd rhs = N.transpose() * sys.F.head(ns) + TN.transpose() * sys.F.tail(nv);
  Eigen::VectorXd w_red = Eigen::VectorXd::Zero(ns);
  if (N.cols() == 0) {
    out.solved = sys.F.head(ns).norm() == 0.0 && sys.F.tail(nv).norm() == 0.0;
  } else {
    const Eigen::VectorXd alpha = B.fullPivLu().solve(rhs);
    w_red = N * alpha;
    out.solved = true;
  }
  out.w = sys.spaces.scalar_constraints.Z * w_red;
  out.gamma = sys.spaces.vector_constraints.Z * (sd.T * w_red);
  return out;
}

double c1_jump(const LagrangeSpace& space, const Eigen::VectorXd& coefficients) {
  if (space.value_dim() != 1) throw std::invalid_argument("c1_jump expects a scalar field");
  const SimplicialMesh& mesh = space.mesh();
  const QuadratureRule rule = simplex_rule(mesh.dim - 1, std::max(2 * space.degree(), 1));
  double jump = 0.0, scale = 0.0;
  for (const MeshFacet& f : mesh_facets(mesh)) {
    if (!f.interior()) continue;
    const Eigen::MatrixXd x = facet_points(facet_vertices(mesh, f), rule.points);
    Eigen::MatrixXd g[2];
    for (int s = 0; s < 2; ++s) {
      const int c = f.cells[static_cast<std::size_t>(s)];
      const BasisTableau t = eval_field(space, coefficients, c, cell_geometry(mesh, c).to_reference(x), 1);
      g[s].resize(x.cols(), mesh.dim);
      for (int k = 0; k < mesh.dim; ++k) g[s].col(k) = t.gradients[static_cast<std::size_t>(k)].col(0);
    }
    jump = std::max(jump, (g[0] - g[1]).rowwise().norm().maxCoeff());
    scale = std::max({scale, g[0].rowwise().norm().maxCoeff(), g[1].rowwise().norm().maxCoeff()});
  }
  // gradients at round-off level of the coefficients: a constant field
  if (scale <= 1e-10 * coefficients.cwiseAbs().maxCoeff()) return 0.0;
  return jump / scale;
}

ErrorNorm broken_sobolev_error(const LagrangeSpace& space, const Eigen::VectorXd& coefficients,
                               const ScalarFunction& exact, int order) {
  return sobolev(space, coefficients, &exact, order);
}

ErrorNorm broken_h2_error(const LagrangeSpace& space, const Eigen::VectorXd& coefficients, const ScalarFunction& exact) {
  return sobolev(space, coefficients, &exact, 2);
}

double broken_sobolev_norm(const LagrangeSpace& space, const Eigen::VectorXd& coefficients, int order) {
  return sobolev(space, coefficients, nullptr, order).absolute;
}

double relative_h1_difference(const LagrangeSpace& space, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double nb = broken_sobolev_norm(space, b, 1);
  const double diff = broken_sobolev_norm(space, a - b, 1);
  if (nb == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / nb;
}

double gradient_mismatch(const LagrangeSpace& scalar, const Eigen::VectorXd& w, const LagrangeSpace& vector,
                         const Eigen::VectorXd& gamma) {
  return XiNormEvaluator(scalar, vector, {1.0, 0.0}).parts(w, gamma).first;
}

double convergence_slope(const std::vector<double>& h, const std::vector<double>& error) {
  if (h.size() != error.size() || h.size() < 2) throw std::invalid_argument("convergence_slope needs at least two (h, error) pairs");
  const auto n = static_cast<double>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !(error[i] > 0.0)) throw std::invalid_argument("convergence_slope needs positive values");
    const double x = std::log(h[i]), y = std::log(error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw std::invalid_argument("convergence_slope needs distinct h values");
  return (n * sxy - sx * sy) / den;
}

namespace {

KernelDimension summarize(const NullspaceResult& ns) {
  KernelDimension k;
  k.dimension = ns.dimension();
  k.rank = ns.rank;
  k.gap = ns.gap();
  k.borderline = k.gap < 1e2;
  return k;
}

}  // namespace

KernelDimension kernel_dimension(std::shared_ptr<const SimplicialMesh> mesh, int p, double rtol) {
  const MixedSpaces spaces = build_mixed_spaces(std::move(mesh), p);
  const PenaltySystem sys = build_penalty_system(spaces, {}, {}, {}, {}, {1.0, 0.0});
  return summarize(schur_nullspace(sys, rtol).nullspace);
}

KernelDimension kernel_dimension_by_jumps(std::shared_ptr<const SimplicialMesh> mesh, int p, double rtol) {
  const LagrangeSpace space(mesh, p, 1);
  const ConstraintSet cs = build_scalar_constraints(space);
  if (cs.num_free() > kOracleMaxDofs) throw std::invalid_argument("jump oracle limited to desk-scale spaces");
  const int d = mesh->dim;
  const Eigen::MatrixXd xi = facet_sample_points(d, p);

  std::map<std::array<int, 3>, BoundaryTag> tags;
  for (int f = 0; f < mesh->num_boundary_facets(); ++f) {
    std::array<int, 3> key{-1, -1, -1};
    for (int k = 0; k < d; ++k) key[static_cast<std::size_t>(k)] = mesh->boundary_facets(k, f);
    std::sort(key.begin(), key.begin() + d);
    tags[key] = mesh->boundary_tags[static_cast<std::size_t>(f)];
  }

  std::vector<Eigen::VectorXd> rows;
  for (const MeshFacet& f : mesh_facets(*mesh)) {
    const Eigen::MatrixXd X = facet_vertices(*mesh, f);
    const Eigen::MatrixXd x = facet_points(X, xi);
    if (f.interior()) {
      const auto g0 = basis_gradients(space, f.cells[0], x);
      const auto g1 = basis_gradients(space, f.cells[1], x);
      for (Eigen::Index q = 0; q < x.cols(); ++q)
        for (int k = 0; k < d; ++k) {
          Eigen::VectorXd row = Eigen::VectorXd::Zero(space.num_dofs());
          for (int a = 0; a < space.nodes_per_cell(); ++a) {
            row[space.cell_nodes()(a, f.cells[0])] += g0[static_cast<std::size_t>(k)](q, a);
            row[space.cell_nodes()(a, f.cells[1])] -= g1[static_cast<std::size_t>(k)](q, a);
          }
          rows.push_back(std::move(row));
        }
    } else {
      const auto it = tags.find(f.vertices);
      if (it == tags.end() || it->second != BoundaryTag::Clamped) continue;
      const Eigen::VectorXd n = facet_normal(*mesh, f.vertices.data());
      const auto g = basis_gradients(space, f.cells[0], x);
      for (Eigen::Index q = 0; q < x.cols(); ++q) {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(space.num_dofs());
        for (int a = 0; a < space.nodes_per_cell(); ++a)
          for (int k = 0; k < d; ++k) row[space.cell_nodes()(a, f.cells[0])] += n[k] * g[static_cast<std::size_t>(k)](q, a);
        rows.push_back(std::move(row));
      }
    }
  }
  Eigen::MatrixXd J(static_cast<Eigen::Index>(rows.size()), space.num_dofs());
  for (std::size_t r = 0; r < rows.size(); ++r) J.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  const Eigen::MatrixXd Jr = J * cs.Z;
  return summarize(dense_nullspace(Jr, rtol, J.norm()));
}

double energy_deviation(const std::vector<double>& energies) {
  if (energies.empty()) return 0.0;
  const double e0 = energies.front();
  double dev = 0.0;
  for (double e : energies) {
    if (e0 == 0.0) {
      if (e != 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    dev = std::max(dev, std::abs(e - e0) / std::abs(e0));
  }
  return dev;
}

}  // namespace c1free
