#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace c1free {

/// Boundary condition class of a facet: clamped (Gamma_c), simply supported (Gamma_s), free (Gamma_f).
enum class BoundaryTag { Clamped, SimplySupported, Free };

std::string_view to_string(BoundaryTag tag);
BoundaryTag parse_boundary_tag(std::string_view word);

/// Conforming simplicial mesh of a 2D or 3D domain with tagged boundary facets.
///
/// Coordinates are stored column-wise (dim x nv), cells as (dim+1) x nc vertex indices with
/// positive orientation, boundary facets as dim x nbf vertex indices with one tag each.
struct SimplicialMesh {
  int dim = 2;
  Eigen::MatrixXd vertices;
  Eigen::MatrixXi cells;
  Eigen::MatrixXi boundary_facets;
  std::vector<BoundaryTag> boundary_tags;

  int num_vertices() const { return static_cast<int>(vertices.cols()); }
  int num_cells() const { return static_cast<int>(cells.cols()); }
  int num_boundary_facets() const { return static_cast<int>(boundary_facets.cols()); }

  /// Signed volume of cell c (positive for valid cells).
  double signed_volume(int c) const;
  double total_volume() const;
};

/// Maps a boundary facet (given by its centroid) to a tag.
using FacetTagger = std::function<BoundaryTag(const Eigen::VectorXd& centroid)>;

/// Rebuild boundary_facets from the cell connectivity: every facet with exactly one adjacent
/// cell becomes a boundary facet, oriented as in that cell, tagged by `tagger`.
void tag_boundary(SimplicialMesh& mesh, const FacetTagger& tagger);
void tag_boundary(SimplicialMesh& mesh, BoundaryTag tag);

/// n x n unit square grid, each square cut along the (0,0)-(1,1) diagonal direction.
SimplicialMesh generate_unit_square_mesh(int n, BoundaryTag tag);

/// Unit cube cut into m^3 subcubes of 6 Kuhn tetrahedra around the (0,0,0)-(1,1,1) diagonal.
SimplicialMesh generate_freudenthal_mesh(int m, BoundaryTag tag);

/// Move every vertex off the boundary by a uniform random offset of at most `amplitude` times its
/// shortest incident edge in each coordinate. Deterministic for a given seed; throws
/// std::runtime_error if a cell would be inverted.
SimplicialMesh perturb_interior_vertices(const SimplicialMesh& mesh, double amplitude, std::uint64_t seed);

/// Barycentric (Alfeld) refinement: each simplex split into dim+1 through its barycenter.
SimplicialMesh alfeld_split(const SimplicialMesh& mesh);

/// Worsey-Farin refinement of a tetrahedral mesh into 12 subtetrahedra per cell. Throws for 2D input.
SimplicialMesh worsey_farin_split(const SimplicialMesh& mesh);

/// Findings of validate_mesh; empty iff the mesh satisfies every structural invariant.
struct ValidationReport {
  std::vector<std::string> orientation;  ///< non-positive cell volumes
  std::vector<std::string> conformity;   ///< hanging vertices, over-shared facets, bad indices
  std::vector<std::string> boundary;     ///< missing, duplicated or spurious boundary facets

  bool ok() const { return orientation.empty() && conformity.empty() && boundary.empty(); }
  std::size_t size() const { return orientation.size() + conformity.size() + boundary.size(); }
  std::string summary() const;
};

ValidationReport validate_mesh(const SimplicialMesh& mesh);

/// A facet with its adjacent cells; cells[1] == -1 on the boundary. local[k] is the local index
/// of the vertex of cells[k] opposite the facet. Vertices are sorted, unused slots are -1.
struct MeshFacet {
  std::array<int, 3> vertices{-1, -1, -1};
  std::array<int, 2> cells{-1, -1};
  std::array<int, 2> local{-1, -1};

  bool interior() const { return cells[1] >= 0; }
};

/// All facets in sorted-vertex order. Throws if a facet is shared by more than two cells.
std::vector<MeshFacet> mesh_facets(const SimplicialMesh& mesh);

/// Index of the vertex within `tol` of x, or -1.
int find_vertex(const SimplicialMesh& mesh, const Eigen::VectorXd& x, double tol = 1e-12);

/// ASCII mesh file ("c1free-mesh 1 <dim> <nv> <nc> <nbf>" header). Coordinates use 17 significant digits.
void write_mesh(const SimplicialMesh& mesh, const std::filesystem::path& path);
void write_mesh(const SimplicialMesh& mesh, std::ostream& out);

/// Parse and validate a mesh file; throws std::runtime_error with a descriptive message.
SimplicialMesh read_mesh(const std::filesystem::path& path);
SimplicialMesh read_mesh(std::istream& in);

}  // namespace c1free
