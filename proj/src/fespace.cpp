#include "c1free/fespace.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace c1free {

Eigen::MatrixXd CellGeometry::to_physical(const Eigen::MatrixXd& ref) const {
  return (J * ref).colwise() + origin;
}

Eigen::MatrixXd CellGeometry::to_reference(const Eigen::MatrixXd& phys) const {
  return Jinv * (phys.colwise() - origin);
}

CellGeometry cell_geometry(const SimplicialMesh& mesh, int cell) {
  if (cell < 0 || cell >= mesh.num_cells()) {
    throw std::out_of_range("cell index " + std::to_string(cell) + " out of range");
  }
  const int d = mesh.dim;
  CellGeometry g;
  g.origin = mesh.vertices.col(mesh.cells(0, cell));
  g.J.resize(d, d);
  for (int k = 0; k < d; ++k) g.J.col(k) = mesh.vertices.col(mesh.cells(k + 1, cell)) - g.origin;
  g.detJ = g.J.determinant();
  g.Jinv = g.J.inverse();
  return g;
}

BasisTableau to_physical(const BasisTableau& ref, const CellGeometry& geom) {
  const int d = ref.dim;
  BasisTableau out;
  out.dim = d;
  out.deriv_order = ref.deriv_order;
  out.values = ref.values;
  if (ref.deriv_order >= 1) {
    out.gradients.assign(static_cast<std::size_t>(d), Eigen::MatrixXd::Zero(ref.values.rows(), ref.values.cols()));
    for (int k = 0; k < d; ++k)
      for (int a = 0; a < d; ++a) {
        const double s = geom.Jinv(a, k);
        if (s != 0.0) out.gradients[static_cast<std::size_t>(k)] += s * ref.gradients[static_cast<std::size_t>(a)];
      }
  }
  if (ref.deriv_order >= 2) {
    out.hessians.assign(static_cast<std::size_t>(d * d), Eigen::MatrixXd::Zero(ref.values.rows(), ref.values.cols()));
    for (int k = 0; k < d; ++k)
      for (int l = k; l < d; ++l) {
        auto& H = out.hessians[static_cast<std::size_t>(k * d + l)];
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) {
            const double s = geom.Jinv(a, k) * geom.Jinv(b, l);
            if (s != 0.0) H += s * ref.hessians[static_cast<std::size_t>(a * d + b)];
          }
        if (l != k) out.hessians[static_cast<std::size_t>(l * d + k)] = H;
      }
  }
  return out;
}

LagrangeSpace::LagrangeSpace(std::shared_ptr<const SimplicialMesh> mesh, int degree, int value_dim, NodeFamily family)
    : mesh_(std::move(mesh)), basis_(mesh_ ? mesh_->dim : 2, degree, family), value_dim_(value_dim) {
  if (!mesh_) throw std::invalid_argument("LagrangeSpace: null mesh");
  if (value_dim < 1) throw std::invalid_argument("LagrangeSpace: value_dim must be positive");
  const SimplicialMesh& m = *mesh_;
  const int nloc = basis_.size();
  cell_nodes_.resize(nloc, m.num_cells());
  vertex_node_.assign(static_cast<std::size_t>(m.num_vertices()), -1);

  if (degree == 0) {
    cell_nodes_.setZero();
    node_coords_ = m.vertices.rowwise().mean();
    supports_.assign(1, {});
    return;
  }

  // A node is identified by its carrier sub-simplex (sorted global vertex ids) and the lattice
  // components listed in that vertex order.
  std::map<std::vector<int>, int> ids;
  std::vector<Eigen::VectorXd> coords;
  const auto& lattice = basis_.lattice();
  std::vector<std::pair<int, int>> carrier;
  for (int c = 0; c < m.num_cells(); ++c) {
    bool geometry_ready = false;
    Eigen::MatrixXd phys;
    for (int a = 0; a < nloc; ++a) {
      carrier.clear();
      for (int k = 0; k <= m.dim; ++k) {
        const int idx = lattice[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)];
        if (idx > 0) carrier.emplace_back(m.cells(k, c), idx);
      }
      std::sort(carrier.begin(), carrier.end());
      std::vector<int> key;
      key.reserve(2 * carrier.size());
      for (const auto& [v, idx] : carrier) key.push_back(v);
      for (const auto& [v, idx] : carrier) key.push_back(idx);
      auto [it, inserted] = ids.emplace(key, static_cast<int>(coords.size()));
      if (inserted) {
        if (!geometry_ready) {
          phys = cell_geometry(m, c).to_physical(basis_.nodes());
          geometry_ready = true;
        }
        coords.push_back(phys.col(a));
        std::vector<int> support(key.begin(), key.begin() + static_cast<std::ptrdiff_t>(carrier.size()));
        if (support.size() == 1) vertex_node_[static_cast<std::size_t>(support[0])] = it->second;
        supports_.push_back(std::move(support));
      }
      cell_nodes_(a, c) = it->second;
    }
  }
  node_coords_.resize(m.dim, static_cast<Eigen::Index>(coords.size()));
  for (std::size_t i = 0; i < coords.size(); ++i) node_coords_.col(static_cast<Eigen::Index>(i)) = coords[i];
}

Eigen::VectorXd LagrangeSpace::interpolate(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f) const {
  Eigen::VectorXd out(num_dofs());
  for (int n = 0; n < num_nodes(); ++n) {
    const Eigen::VectorXd v = f(node_coords_.col(n));
    if (v.size() != value_dim_) throw std::invalid_argument("interpolate: callback returned wrong value size");
    out.segment(n * value_dim_, value_dim_) = v;
  }
  return out;
}

Eigen::VectorXd LagrangeSpace::interpolate_scalar(const std::function<double(const Eigen::VectorXd&)>& f) const {
  if (value_dim_ != 1) throw std::invalid_argument("interpolate_scalar: vector space");
  Eigen::VectorXd out(num_nodes());
  for (int n = 0; n < num_nodes(); ++n) out[n] = f(node_coords_.col(n));
  return out;
}

Eigen::VectorXd LagrangeSpace::cell_coefficients(const Eigen::VectorXd& global, int cell) const {
  Eigen::VectorXd local(dofs_per_cell());
  for (int a = 0; a < nodes_per_cell(); ++a)
    for (int i = 0; i < value_dim_; ++i) local[a * value_dim_ + i] = global[dof(cell_nodes_(a, cell), i)];
  return local;
}

LagrangeSpace build_space(std::shared_ptr<const SimplicialMesh> mesh, int p, int value_dim) {
  return LagrangeSpace(std::move(mesh), p, value_dim);
}

Eigen::VectorXd facet_normal(const SimplicialMesh& mesh, const int* v) {
  Eigen::VectorXd n(mesh.dim);
  if (mesh.dim == 2) {
    const Eigen::Vector2d t = mesh.vertices.col(v[1]) - mesh.vertices.col(v[0]);
    n << -t.y(), t.x();
  } else {
    const Eigen::Vector3d a = mesh.vertices.col(v[1]) - mesh.vertices.col(v[0]);
    const Eigen::Vector3d b = mesh.vertices.col(v[2]) - mesh.vertices.col(v[0]);
    n = a.cross(b);
  }
  return n.normalized();
}

namespace {

bool contains_all(const SimplicialMesh& mesh, int facet, const std::vector<int>& support) {
  for (int v : support) {
    bool found = false;
    for (int k = 0; k < mesh.dim; ++k) found = found || mesh.boundary_facets(k, facet) == v;
    if (!found) return false;
  }
  return true;
}

// Boundary facets whose closure contains every vertex of `support`.
std::vector<int> adjacent_facets(const SimplicialMesh& mesh, const std::vector<std::vector<int>>& by_vertex,
                                 const std::vector<int>& support) {
  std::vector<int> out;
  if (support.empty()) {
    for (int f = 0; f < mesh.num_boundary_facets(); ++f) out.push_back(f);
    return out;
  }
  for (int f : by_vertex[static_cast<std::size_t>(support[0])])
    if (contains_all(mesh, f, support)) out.push_back(f);
  return out;
}

std::vector<std::vector<int>> facets_by_vertex(const SimplicialMesh& mesh) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(mesh.num_vertices()));
  for (int f = 0; f < mesh.num_boundary_facets(); ++f)
    for (int k = 0; k < mesh.dim; ++k) out[static_cast<std::size_t>(mesh.boundary_facets(k, f))].push_back(f);
  return out;
}

}  // namespace

ConstraintSet identity_constraints(int n) {
  ConstraintSet cs;
  cs.Z.resize(n, n);
  cs.Z.setIdentity();
  return cs;
}

ConstraintSet build_scalar_constraints(const LagrangeSpace& space) {
  if (space.value_dim() != 1) throw std::invalid_argument("build_scalar_constraints: space is not scalar");
  const SimplicialMesh& mesh = space.mesh();
  const auto by_vertex = facets_by_vertex(mesh);
  ConstraintSet cs;
  std::vector<Eigen::Triplet<double, int>> trips;
  int col = 0;
  for (int n = 0; n < space.num_nodes(); ++n) {
    bool clamped = false, simply = false;
    for (int f : adjacent_facets(mesh, by_vertex, space.node_support(n))) {
      const BoundaryTag t = mesh.boundary_tags[static_cast<std::size_t>(f)];
      clamped = clamped || t == BoundaryTag::Clamped;
      simply = simply || t == BoundaryTag::SimplySupported;
    }
    if (clamped) {
      ++cs.eliminated_clamped;
    } else if (simply) {
      ++cs.eliminated_simply;
    } else {
      trips.emplace_back(n, col++, 1.0);
    }
  }
  cs.Z.resize(space.num_nodes(), col);
  cs.Z.setFromTriplets(trips.begin(), trips.end());
  return cs;
}

ConstraintSet build_vector_constraints(const LagrangeSpace& space) {
  const SimplicialMesh& mesh = space.mesh();
  const int vd = space.value_dim();
  if (vd != mesh.dim) throw std::invalid_argument("build_vector_constraints: value_dim must equal the mesh dimension");
  const auto by_vertex = facets_by_vertex(mesh);
  std::vector<Eigen::VectorXd> normals(static_cast<std::size_t>(mesh.num_boundary_facets()));
  for (int f = 0; f < mesh.num_boundary_facets(); ++f) normals[static_cast<std::size_t>(f)] = facet_normal(mesh, &mesh.boundary_facets(0, f));

  ConstraintSet cs;
  std::vector<Eigen::Triplet<double, int>> trips;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(vd, vd);
  int col = 0;
  for (int n = 0; n < space.num_nodes(); ++n) {
    std::vector<Eigen::MatrixXd> rows;
    bool clamped = false;
    for (int f : adjacent_facets(mesh, by_vertex, space.node_support(n))) {
      const BoundaryTag t = mesh.boundary_tags[static_cast<std::size_t>(f)];
      if (t == BoundaryTag::Clamped) {
        clamped = true;
        rows.push_back(I);
      } else if (t == BoundaryTag::SimplySupported) {
        const Eigen::VectorXd& nu = normals[static_cast<std::size_t>(f)];
        rows.push_back(I - nu * nu.transpose());
      }
    }
    Eigen::MatrixXd basis = I;
    if (!rows.empty()) {
      Eigen::MatrixXd C(static_cast<Eigen::Index>(rows.size()) * vd, vd);
      for (std::size_t r = 0; r < rows.size(); ++r) C.middleRows(static_cast<Eigen::Index>(r) * vd, vd) = rows[r];
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
      const auto& s = svd.singularValues();
      int rank = 0;
      for (int k = 0; k < s.size(); ++k) rank += s[k] > 1e-10 * s[0];
      basis = svd.matrixV().rightCols(vd - rank);
      (clamped ? cs.eliminated_clamped : cs.eliminated_simply) += rank;
    }
    for (int j = 0; j < basis.cols(); ++j) {
      for (int i = 0; i < vd; ++i)
        if (basis(i, j) != 0.0) trips.emplace_back(space.dof(n, i), col, basis(i, j));
      ++col;
    }
  }
  cs.Z.resize(space.num_dofs(), col);
  cs.Z.setFromTriplets(trips.begin(), trips.end());
  return cs;
}

BasisTableau eval_field(const LagrangeSpace& space, const Eigen::VectorXd& coefficients, int cell,
                        const Eigen::MatrixXd& ref_points, int deriv_order) {
  if (coefficients.size() != space.num_dofs()) throw std::invalid_argument("eval_field: coefficient length mismatch");
  const CellGeometry geom = cell_geometry(space.mesh(), cell);
  const BasisTableau phys = to_physical(space.basis().tabulate(ref_points, deriv_order), geom);
  const int vd = space.value_dim();
  const Eigen::VectorXd local = space.cell_coefficients(coefficients, cell);
  const Eigen::Map<const Eigen::MatrixXd> C(local.data(), vd, space.nodes_per_cell());
  BasisTableau out;
  out.dim = phys.dim;
  out.deriv_order = deriv_order;
  out.values = phys.values * C.transpose();
  for (const auto& G : phys.gradients) out.gradients.push_back(G * C.transpose());
  for (const auto& H : phys.hessians) out.hessians.push_back(H * C.transpose());
  return out;
}

}  // namespace c1free
