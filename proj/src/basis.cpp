#include "c1free/basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "c1free/polynomials.hpp"
#include "c1free/quadrature.hpp"

namespace c1free {

namespace {

// Second-order forward-mode value: f, grad f, Hessian of f (packed symmetric, 3D).
struct Jet {
  double v = 0.0;
  std::array<double, 3> g{};
  std::array<double, 6> h{};  // xx, xy, xz, yy, yz, zz

  static Jet constant(double c) {
    Jet j;
    j.v = c;
    return j;
  }
  // a + sum_k b_k x_k
  static Jet affine(double a, double bx, double by, double bz, const double* x) {
    Jet j;
    j.v = a + bx * x[0] + by * x[1] + bz * x[2];
    j.g = {bx, by, bz};
    return j;
  }
};

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v + b.v;
  for (int i = 0; i < 3; ++i) r.g[i] = a.g[i] + b.g[i];
  for (int i = 0; i < 6; ++i) r.h[i] = a.h[i] + b.h[i];
  return r;
}

inline Jet operator-(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v - b.v;
  for (int i = 0; i < 3; ++i) r.g[i] = a.g[i] - b.g[i];
  for (int i = 0; i < 6; ++i) r.h[i] = a.h[i] - b.h[i];
  return r;
}

inline Jet operator*(double s, const Jet& a) {
  Jet r;
  r.v = s * a.v;
  for (int i = 0; i < 3; ++i) r.g[i] = s * a.g[i];
  for (int i = 0; i < 6; ++i) r.h[i] = s * a.h[i];
  return r;
}

inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v * b.v;
  for (int i = 0; i < 3; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
  constexpr int pi[6] = {0, 0, 0, 1, 1, 2};
  constexpr int pj[6] = {0, 1, 2, 1, 2, 2};
  for (int k = 0; k < 6; ++k) {
    r.h[k] = a.h[k] * b.v + a.v * b.h[k] + a.g[pi[k]] * b.g[pj[k]] + a.g[pj[k]] * b.g[pi[k]];
  }
  return r;
}

// t^n P_n^{(alpha,0)}(u/t), n = 0..nmax, by the homogenized three-term recurrence.
void scaled_jacobi(int nmax, double alpha, const Jet& u, const Jet& t, std::vector<Jet>& out) {
  out.resize(static_cast<std::size_t>(nmax) + 1);
  out[0] = Jet::constant(1.0);
  if (nmax == 0) return;
  out[1] = 0.5 * ((alpha + 2.0) * u + alpha * t);
  if (nmax == 1) return;
  const Jet t2 = t * t;
  for (int n = 2; n <= nmax; ++n) {
    const double a1 = 2.0 * n * (n + alpha) * (2.0 * n + alpha - 2.0);
    const double c = 2.0 * n + alpha;
    const Jet lin = (c * (c - 2.0)) * u + (alpha * alpha) * t;
    out[static_cast<std::size_t>(n)] =
        (1.0 / a1) * ((c - 1.0) * (lin * out[static_cast<std::size_t>(n - 1)]) -
                      (2.0 * (n + alpha - 1.0) * (n - 1.0) * c) * (t2 * out[static_cast<std::size_t>(n - 2)]));
  }
}

// Unnormalized Dubiner modal basis at one point, in the canonical (i,j[,k]) order.
void modal_basis(int dim, int p, const double* xin, std::vector<Jet>& out) {
  const double x[3] = {xin[0], dim > 1 ? xin[1] : 0.0, dim > 2 ? xin[2] : 0.0};
  out.clear();
  std::vector<Jet> qi, rj, sk;
  if (dim == 1) {
    const Jet u = Jet::affine(-1.0, 2.0, 0.0, 0.0, x);
    scaled_jacobi(p, 0.0, u, Jet::constant(1.0), qi);
    out = qi;
    return;
  }
  if (dim == 2) {
    const Jet t1 = Jet::affine(1.0, 0.0, -1.0, 0.0, x);
    const Jet u1 = Jet::affine(-1.0, 2.0, 1.0, 0.0, x);
    const Jet c = Jet::affine(-1.0, 0.0, 2.0, 0.0, x);
    scaled_jacobi(p, 0.0, u1, t1, qi);
    for (int i = 0; i <= p; ++i) {
      scaled_jacobi(p - i, 2.0 * i + 1.0, c, Jet::constant(1.0), rj);
      for (int j = 0; j <= p - i; ++j) out.push_back(qi[i] * rj[j]);
    }
    return;
  }
  const Jet t1 = Jet::affine(1.0, 0.0, -1.0, -1.0, x);
  const Jet u1 = Jet::affine(-1.0, 2.0, 1.0, 1.0, x);
  const Jet t2 = Jet::affine(1.0, 0.0, 0.0, -1.0, x);
  const Jet u2 = Jet::affine(-1.0, 0.0, 2.0, 1.0, x);
  const Jet c = Jet::affine(-1.0, 0.0, 0.0, 2.0, x);
  scaled_jacobi(p, 0.0, u1, t1, qi);
  for (int i = 0; i <= p; ++i) {
    scaled_jacobi(p - i, 2.0 * i + 1.0, u2, t2, rj);
    for (int j = 0; j <= p - i; ++j) {
      const Jet qr = qi[i] * rj[j];
      scaled_jacobi(p - i - j, 2.0 * (i + j) + 2.0, c, Jet::constant(1.0), sk);
      for (int k = 0; k <= p - i - j; ++k) out.push_back(qr * sk[k]);
    }
  }
}

// Equilateral reference vertices used by the warp & blend construction.
Eigen::MatrixXd equilateral_vertices(int dim) {
  Eigen::MatrixXd v(dim, dim + 1);
  if (dim == 1) {
    v << -1.0, 1.0;
  } else if (dim == 2) {
    v << -1.0, 1.0, 0.0,
        -1.0 / std::sqrt(3.0), -1.0 / std::sqrt(3.0), 2.0 / std::sqrt(3.0);
  } else {
    v << -1.0, 1.0, 0.0, 0.0,
        -1.0 / std::sqrt(3.0), -1.0 / std::sqrt(3.0), 2.0 / std::sqrt(3.0), 0.0,
        -1.0 / std::sqrt(6.0), -1.0 / std::sqrt(6.0), -1.0 / std::sqrt(6.0), 3.0 / std::sqrt(6.0);
  }
  return v;
}

// Optimized blending exponents from Hesthaven & Warburton, Nodal DG Methods, sec. 6.1 / 10.1.
double warp_alpha(int dim, int p) {
  static constexpr double a2[15] = {0.0000, 0.0000, 1.4152, 0.1001, 0.2751, 0.9800, 1.0999, 1.2832,
                                    1.3648, 1.4773, 1.4959, 1.5743, 1.5770, 1.6223, 1.6258};
  static constexpr double a3[15] = {0.0, 0.0, 0.0, 0.1002, 1.1332, 1.5608, 1.3413, 1.2577,
                                    1.1603, 1.10153, 0.6080, 0.4523, 0.8856, 0.8717, 0.9655};
  if (dim == 2) return p <= 15 ? a2[p - 1] : 5.0 / 3.0;
  return p <= 15 ? a3[p - 1] : 1.0;
}

// Displacement from equispaced to Gauss-Lobatto along [-1,1], divided by (1 - r^2).
double warp_factor(int p, const Eigen::VectorXd& gll, double r) {
  double warp = 0.0;
  for (int i = 0; i <= p; ++i) {
    const double xi = -1.0 + 2.0 * i / p;
    const double d = gll[i] - xi;
    if (d == 0.0) continue;
    double ell = 1.0;
    for (int j = 0; j <= p; ++j) {
      if (j == i) continue;
      const double xj = -1.0 + 2.0 * j / p;
      ell *= (r - xj) / (xi - xj);
    }
    warp += d * ell;
  }
  if (std::abs(r) < 1.0 - 1e-10) warp /= (1.0 - r * r);
  return warp;
}

// In-plane shift of the 2D warp & blend construction on the triangle (a, b, c), returned in
// the ambient equilateral coordinates. Symmetric in the three vertices.
Eigen::VectorXd face_shift(int p, double alpha, const Eigen::VectorXd& gll, const Eigen::MatrixXd& V,
                           const double* L, const std::array<int, 3>& f) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(V.rows());
  for (int e = 0; e < 3; ++e) {
    const int c = f[static_cast<std::size_t>(e)];
    const int d = f[static_cast<std::size_t>((e + 1) % 3)];
    const int b = f[static_cast<std::size_t>((e + 2) % 3)];
    const double blend = 4.0 * L[c] * L[d];
    if (blend == 0.0) continue;
    const double w = warp_factor(p, gll, L[d] - L[c]);
    const double ab = alpha * L[b];
    Eigen::VectorXd dir = V.col(d) - V.col(c);
    dir.normalize();
    s += blend * w * (1.0 + ab * ab) * dir;
  }
  return s;
}

Eigen::VectorXd warp_blend_barycentric(int dim, int p, const LatticeIndex& a) {
  const Eigen::MatrixXd V = equilateral_vertices(dim);
  double L[4] = {0, 0, 0, 0};
  for (int k = 0; k <= dim; ++k) L[k] = static_cast<double>(a[static_cast<std::size_t>(k)]) / p;
  Eigen::VectorXd X = Eigen::VectorXd::Zero(dim);
  for (int k = 0; k <= dim; ++k) X += L[k] * V.col(k);

  const Eigen::VectorXd gll = gauss_lobatto_points(p);
  if (dim == 1) {
    X[0] = gll[a[1]];
  } else if (dim == 2) {
    X += face_shift(p, warp_alpha(2, p), gll, V, L, {0, 1, 2});
  } else {
    const double alpha = warp_alpha(3, p);
    constexpr double tol = 1e-10;
    Eigen::VectorXd shift = Eigen::VectorXd::Zero(3);
    for (int face = 0; face < 4; ++face) {
      std::array<int, 3> f{};
      int n = 0;
      for (int k = 0; k < 4; ++k)
        if (k != face) f[static_cast<std::size_t>(n++)] = k;
      const double La = L[face];
      const Eigen::VectorXd fs = face_shift(p, alpha, gll, V, L, f);
      double blend = L[f[0]] * L[f[1]] * L[f[2]];
      const double denom = (L[f[0]] + 0.5 * La) * (L[f[1]] + 0.5 * La) * (L[f[2]] + 0.5 * La);
      if (denom > tol) blend = (1.0 + (alpha * La) * (alpha * La)) * blend / denom;
      shift += blend * fs;
      const int positive = (L[f[0]] > tol) + (L[f[1]] > tol) + (L[f[2]] > tol);
      if (La < tol && positive < 3) shift = fs;
    }
    X += shift;
  }
  // back to barycentric coordinates
  Eigen::MatrixXd A(dim + 1, dim + 1);
  A.topRows(dim) = V;
  A.row(dim).setOnes();
  Eigen::VectorXd rhs(dim + 1);
  rhs.head(dim) = X;
  rhs[dim] = 1.0;
  Eigen::VectorXd lam = A.partialPivLu().solve(rhs);
  // exact zeros on entities the node does not touch
  for (int k = 0; k <= dim; ++k)
    if (a[static_cast<std::size_t>(k)] == 0) lam[k] = 0.0;
  return lam;
}

std::vector<LatticeIndex> lattice_indices(int dim, int p) {
  std::vector<LatticeIndex> out;
  LatticeIndex a{0, 0, 0, 0};
  auto rec = [&](auto&& self, int slot, int remaining) -> void {
    if (slot == dim) {
      a[static_cast<std::size_t>(slot)] = remaining;
      out.push_back(a);
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      a[static_cast<std::size_t>(slot)] = v;
      self(self, slot + 1, remaining - v);
    }
  };
  rec(rec, 0, p);
  auto support_key = [dim](const LatticeIndex& x) {
    int cnt = 0;
    for (int k = 0; k <= dim; ++k) cnt += x[static_cast<std::size_t>(k)] > 0;
    return cnt;
  };
  auto support_mask = [dim](const LatticeIndex& x) {
    int mask = 0;
    for (int k = 0; k <= dim; ++k)
      if (x[static_cast<std::size_t>(k)] > 0) mask |= 1 << k;
    return mask;
  };
  std::stable_sort(out.begin(), out.end(), [&](const LatticeIndex& l, const LatticeIndex& r) {
    const int sl = support_key(l), sr = support_key(r);
    if (sl != sr) return sl < sr;
    const int ml = support_mask(l), mr = support_mask(r);
    if (ml != mr) return ml < mr;
    return l > r;
  });
  return out;
}

}  // namespace

int polynomial_space_dim(int dim, int p) {
  long long num = 1, den = 1;
  for (int k = 1; k <= dim; ++k) {
    num *= (p + k);
    den *= k;
  }
  return static_cast<int>(num / den);
}

ReferenceBasis::ReferenceBasis(int dim, int degree, NodeFamily family)
    : dim_(dim), degree_(degree), family_(family) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("ReferenceBasis: dim must be 1, 2 or 3");
  if (degree < 0 || degree > kMaxBasisDegree) {
    throw std::invalid_argument("ReferenceBasis: degree " + std::to_string(degree) + " out of range [0, " +
                                std::to_string(kMaxBasisDegree) + "]");
  }
  if (family == NodeFamily::Equispaced && degree > 6) {
    throw std::invalid_argument("ReferenceBasis: equispaced nodes are limited to p <= 6");
  }
  const int n = polynomial_space_dim(dim, degree);
  nodes_.resize(dim, n);
  if (degree == 0) {
    lattice_.push_back({0, 0, 0, 0});
    nodes_.setConstant(1.0 / (dim + 1));
  } else {
    lattice_ = lattice_indices(dim, degree);
    for (int i = 0; i < n; ++i) {
      const LatticeIndex& a = lattice_[static_cast<std::size_t>(i)];
      if (family == NodeFamily::Equispaced) {
        for (int k = 0; k < dim; ++k) nodes_(k, i) = static_cast<double>(a[static_cast<std::size_t>(k + 1)]) / degree;
      } else {
        const Eigen::VectorXd lam = warp_blend_barycentric(dim, degree, a);
        for (int k = 0; k < dim; ++k) nodes_(k, i) = lam[k + 1];
      }
    }
  }

  // modal normalization by quadrature, then the generalized Vandermonde inverse
  const QuadratureRule rule = simplex_rule(dim, 2 * degree);
  modal_scale_ = Eigen::VectorXd::Zero(n);
  std::vector<Jet> psi;
  for (int q = 0; q < rule.size(); ++q) {
    modal_basis(dim, degree, rule.points.col(q).data(), psi);
    for (int j = 0; j < n; ++j) modal_scale_[j] += rule.weights[q] * psi[static_cast<std::size_t>(j)].v * psi[static_cast<std::size_t>(j)].v;
  }
  modal_scale_ = modal_scale_.cwiseSqrt().cwiseInverse();

  Eigen::MatrixXd V(n, n);
  for (int i = 0; i < n; ++i) {
    modal_basis(dim, degree, nodes_.col(i).data(), psi);
    for (int j = 0; j < n; ++j) V(i, j) = psi[static_cast<std::size_t>(j)].v * modal_scale_[j];
  }
  nodal_coeffs_ = V.partialPivLu().inverse();
}

BasisTableau ReferenceBasis::tabulate(const Eigen::MatrixXd& points, int deriv_order) const {
  if (deriv_order < 0 || deriv_order > 2) {
    throw std::invalid_argument("tabulate: deriv_order must be 0, 1 or 2");
  }
  if (points.rows() != dim_) throw std::invalid_argument("tabulate: point dimension mismatch");
  const int np = static_cast<int>(points.cols());
  const int n = size();
  Eigen::MatrixXd mv(np, n);
  std::vector<Eigen::MatrixXd> mg(deriv_order >= 1 ? dim_ : 0, Eigen::MatrixXd(np, n));
  std::vector<Eigen::MatrixXd> mh(deriv_order >= 2 ? dim_ * dim_ : 0, Eigen::MatrixXd(np, n));
  constexpr int packed[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  std::vector<Jet> psi;
  for (int q = 0; q < np; ++q) {
    double x[3] = {0, 0, 0};
    for (int k = 0; k < dim_; ++k) x[k] = points(k, q);
    modal_basis(dim_, degree_, x, psi);
    for (int j = 0; j < n; ++j) {
      const Jet& J = psi[static_cast<std::size_t>(j)];
      const double s = modal_scale_[j];
      mv(q, j) = s * J.v;
      if (deriv_order >= 1)
        for (int a = 0; a < dim_; ++a) mg[static_cast<std::size_t>(a)](q, j) = s * J.g[static_cast<std::size_t>(a)];
      if (deriv_order >= 2)
        for (int a = 0; a < dim_; ++a)
          for (int b = 0; b < dim_; ++b)
            mh[static_cast<std::size_t>(a * dim_ + b)](q, j) = s * J.h[static_cast<std::size_t>(packed[a][b])];
    }
  }
  BasisTableau t;
  t.dim = dim_;
  t.deriv_order = deriv_order;
  t.values = mv * nodal_coeffs_;
  for (auto& g : mg) t.gradients.push_back(g * nodal_coeffs_);
  for (auto& h : mh) t.hessians.push_back(h * nodal_coeffs_);
  return t;
}

Eigen::MatrixXd reference_nodes(int dim, int p, NodeFamily family) {
  if (p < 1 || p > kMaxBasisDegree) {
    throw std::invalid_argument("reference_nodes: p = " + std::to_string(p) + " out of range [1, " +
                                std::to_string(kMaxBasisDegree) + "]");
  }
  return ReferenceBasis(dim, p, family).nodes();
}

BasisTableau eval_basis(int dim, int p, const Eigen::MatrixXd& points, int deriv_order) {
  if (deriv_order < 0 || deriv_order > 2) {
    throw std::invalid_argument("eval_basis: deriv_order must be 0, 1 or 2");
  }
  return ReferenceBasis(dim, p).tabulate(points, deriv_order);
}

}  // namespace c1free
