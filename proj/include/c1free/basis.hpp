#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace c1free {

inline constexpr int kMaxBasisDegree = 20;

/// Node placement on the reference simplex.
enum class NodeFamily {
  WarpBlend,   ///< Warburton's warp & blend nodes (Gauss-Lobatto on edges)
  Equispaced,  ///< uniform lattice, debugging only (p <= 6)
};

/// Barycentric lattice index of a node: entries 0..dim are used, they sum to the degree.
using LatticeIndex = std::array<int, 4>;

/// Shape function values and reference derivatives at a set of points.
/// Hessian entry (i,j) lives at hessians[i * dim + j].
struct BasisTableau {
  int dim = 0;
  int deriv_order = 0;
  Eigen::MatrixXd values;                  ///< points x basis
  std::vector<Eigen::MatrixXd> gradients;  ///< dim entries, points x basis
  std::vector<Eigen::MatrixXd> hessians;   ///< dim*dim entries, points x basis

  int num_points() const { return static_cast<int>(values.rows()); }
  int num_basis() const { return static_cast<int>(values.cols()); }
};

/// Nodal Lagrange basis of P_p on the reference simplex {x_i >= 0, sum x_i <= 1}.
///
/// Nodes are ordered vertices, edge interiors, face interiors, cell interior. Nodes on a
/// sub-entity depend only on the barycentric coordinates restricted to that entity and are
/// invariant under its vertex permutations, so two cells sharing a facet see the same trace
/// nodes. Evaluation goes through a generalized Vandermonde solve against an orthonormal
/// Dubiner-type modal basis.
///
/// Degree 0 is accepted and gives the single constant function with its node at the barycenter.
class ReferenceBasis {
 public:
  ReferenceBasis(int dim, int degree, NodeFamily family = NodeFamily::WarpBlend);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(lattice_.size()); }
  NodeFamily family() const { return family_; }

  /// dim x size() reference coordinates of the nodes.
  const Eigen::MatrixXd& nodes() const { return nodes_; }
  const std::vector<LatticeIndex>& lattice() const { return lattice_; }

  /// Values (deriv_order 0), plus gradients (>= 1), plus Hessians (2) at dim x n points.
  BasisTableau tabulate(const Eigen::MatrixXd& points, int deriv_order) const;

 private:
  int dim_;
  int degree_;
  NodeFamily family_;
  std::vector<LatticeIndex> lattice_;
  Eigen::MatrixXd nodes_;
  Eigen::VectorXd modal_scale_;   // 1 / L2 norm of each modal function
  Eigen::MatrixXd nodal_coeffs_;  // inverse generalized Vandermonde
};

/// Node set of ReferenceBasis(dim, p, family); 1 <= p <= 20.
Eigen::MatrixXd reference_nodes(int dim, int p, NodeFamily family = NodeFamily::WarpBlend);

/// Convenience wrapper around ReferenceBasis::tabulate; deriv_order must be 0, 1 or 2.
BasisTableau eval_basis(int dim, int p, const Eigen::MatrixXd& points, int deriv_order);

/// Number of polynomials of total degree <= p in dim variables, C(p+dim, dim).
int polynomial_space_dim(int dim, int p);

}  // namespace c1free
