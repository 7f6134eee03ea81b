#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "c1free/basis.hpp"
#include "c1free/mesh.hpp"

namespace c1free {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Affine map x = origin + J * xi of a cell from the reference simplex.
struct CellGeometry {
  Eigen::VectorXd origin;
  Eigen::MatrixXd J;
  Eigen::MatrixXd Jinv;
  double detJ = 0.0;

  Eigen::MatrixXd to_physical(const Eigen::MatrixXd& ref) const;
  Eigen::MatrixXd to_reference(const Eigen::MatrixXd& phys) const;
};

CellGeometry cell_geometry(const SimplicialMesh& mesh, int cell);

/// Push reference derivatives through an affine map: gradients by J^{-T}, Hessians by J^{-T} H J^{-1}.
BasisTableau to_physical(const BasisTableau& ref, const CellGeometry& geom);

/// Global C0 Lagrange space of degree p with value_dim components per node.
///
/// DOFs are interleaved: component i of node n is dof n * value_dim + i. Degree 0 gives the
/// continuous piecewise constants, i.e. a single global node.
class LagrangeSpace {
 public:
  LagrangeSpace(std::shared_ptr<const SimplicialMesh> mesh, int degree, int value_dim,
                NodeFamily family = NodeFamily::WarpBlend);

  const SimplicialMesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const SimplicialMesh>& mesh_ptr() const { return mesh_; }
  const ReferenceBasis& basis() const { return basis_; }
  int dim() const { return mesh_->dim; }
  int degree() const { return basis_.degree(); }
  int value_dim() const { return value_dim_; }
  int num_nodes() const { return static_cast<int>(node_coords_.cols()); }
  int num_dofs() const { return num_nodes() * value_dim_; }
  int nodes_per_cell() const { return basis_.size(); }
  int dofs_per_cell() const { return basis_.size() * value_dim_; }

  /// nodes_per_cell x num_cells global node numbers.
  const Eigen::MatrixXi& cell_nodes() const { return cell_nodes_; }
  int dof(int node, int comp) const { return node * value_dim_ + comp; }

  /// dim x num_nodes physical node positions.
  const Eigen::MatrixXd& node_coords() const { return node_coords_; }

  /// Global vertex ids of the sub-simplex carrying each node (empty for the degree-0 node).
  const std::vector<int>& node_support(int node) const { return supports_[static_cast<std::size_t>(node)]; }

  /// Node sitting on mesh vertex v, or -1 (degree 0).
  int vertex_node(int v) const { return vertex_node_[static_cast<std::size_t>(v)]; }

  /// Nodal interpolant of f, which returns value_dim components at a physical point.
  Eigen::VectorXd interpolate(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f) const;
  Eigen::VectorXd interpolate_scalar(const std::function<double(const Eigen::VectorXd&)>& f) const;

  /// Gather the cell-local coefficient vector (local dof a * value_dim + i).
  Eigen::VectorXd cell_coefficients(const Eigen::VectorXd& global, int cell) const;

 private:
  std::shared_ptr<const SimplicialMesh> mesh_;
  ReferenceBasis basis_;
  int value_dim_;
  Eigen::MatrixXi cell_nodes_;
  Eigen::MatrixXd node_coords_;
  std::vector<std::vector<int>> supports_;
  std::vector<int> vertex_node_;
};

LagrangeSpace build_space(std::shared_ptr<const SimplicialMesh> mesh, int p, int value_dim);

/// Homogeneous restriction full = Z * free with orthonormal node blocks.
struct ConstraintSet {
  SparseMatrix Z;
  int eliminated_clamped = 0;  ///< DOFs removed at nodes touching a clamped facet
  int eliminated_simply = 0;   ///< DOFs removed at nodes touching only simply supported facets

  int num_full() const { return static_cast<int>(Z.rows()); }
  int num_free() const { return static_cast<int>(Z.cols()); }
  int eliminated() const { return num_full() - num_free(); }
};

/// Zero every node on the closure of a Clamped or SimplySupported facet.
ConstraintSet build_scalar_constraints(const LagrangeSpace& space);

/// Clamped facets fix the whole vector, SimplySupported facets its tangential part. Node blocks are
/// orthonormal bases of the intersection of the admissible subspaces (SVD, relative tolerance 1e-10).
ConstraintSet build_vector_constraints(const LagrangeSpace& space);

ConstraintSet identity_constraints(int n);

/// Field values and physical derivatives at reference points of one cell; layout as BasisTableau
/// with points x value_dim matrices.
BasisTableau eval_field(const LagrangeSpace& space, const Eigen::VectorXd& coefficients, int cell,
                        const Eigen::MatrixXd& ref_points, int deriv_order);

/// Unit normal of a boundary facet given by its vertex ids (orientation unspecified).
Eigen::VectorXd facet_normal(const SimplicialMesh& mesh, const int* vertices);

}  // namespace c1free
