#include "c1free/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace c1free {

namespace {

using FacetKey = std::array<int, 3>;  // sorted vertex ids, unused slot = -1

FacetKey make_key(const int* v, int n) {
  FacetKey k{-1, -1, -1};
  for (int i = 0; i < n; ++i) k[static_cast<std::size_t>(i)] = v[i];
  std::sort(k.begin(), k.begin() + n);
  return k;
}

// Vertices of the facet of `cell` opposite local vertex i, oriented as the cell boundary.
std::vector<int> cell_facet(const SimplicialMesh& mesh, int cell, int i) {
  std::vector<int> f;
  for (int k = 0; k <= mesh.dim; ++k)
    if (k != i) f.push_back(mesh.cells(k, cell));
  if (i % 2 == 1) std::swap(f[0], f[1]);
  return f;
}

struct FacetUse {
  int count = 0;
  int cell = -1;
  int local = -1;
};

std::map<FacetKey, FacetUse> facet_table(const SimplicialMesh& mesh) {
  std::map<FacetKey, FacetUse> table;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int i = 0; i <= mesh.dim; ++i) {
      const auto f = cell_facet(mesh, c, i);
      auto& use = table[make_key(f.data(), mesh.dim)];
      if (use.count++ == 0) {
        use.cell = c;
        use.local = i;
      }
    }
  }
  return table;
}

double simplex_signed_volume(const Eigen::MatrixXd& pts) {
  const int d = static_cast<int>(pts.rows());
  Eigen::MatrixXd J(d, d);
  for (int k = 0; k < d; ++k) J.col(k) = pts.col(k + 1) - pts.col(0);
  double fact = 1.0;
  for (int k = 2; k <= d; ++k) fact *= k;
  return J.determinant() / fact;
}

Eigen::MatrixXd gather(const SimplicialMesh& mesh, const std::vector<int>& ids) {
  Eigen::MatrixXd pts(mesh.dim, static_cast<Eigen::Index>(ids.size()));
  for (std::size_t k = 0; k < ids.size(); ++k) pts.col(static_cast<Eigen::Index>(k)) = mesh.vertices.col(ids[k]);
  return pts;
}

int append_vertex(Eigen::MatrixXd& verts, int& count, const Eigen::VectorXd& x) {
  if (count == verts.cols()) verts.conservativeResize(Eigen::NoChange, std::max<Eigen::Index>(8, 2 * verts.cols()));
  verts.col(count) = x;
  return count++;
}

void orient_positive(std::vector<int>& cell, const Eigen::MatrixXd& verts) {
  const int d = static_cast<int>(cell.size()) - 1;
  Eigen::MatrixXd pts(d, d + 1);
  for (int k = 0; k <= d; ++k) pts.col(k) = verts.col(cell[static_cast<std::size_t>(k)]);
  if (simplex_signed_volume(pts) < 0.0) std::swap(cell[0], cell[1]);
}

SimplicialMesh assemble(int dim, const Eigen::MatrixXd& verts, int nv, const std::vector<std::vector<int>>& cells) {
  SimplicialMesh m;
  m.dim = dim;
  m.vertices = verts.leftCols(nv);
  m.cells.resize(dim + 1, static_cast<Eigen::Index>(cells.size()));
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (int k = 0; k <= dim; ++k) m.cells(k, static_cast<Eigen::Index>(c)) = cells[c][static_cast<std::size_t>(k)];
  return m;
}

bool point_in_facet(const Eigen::MatrixXd& f, const Eigen::VectorXd& x, double tol) {
  const int d = static_cast<int>(f.rows());
  if (d == 2) {
    const Eigen::Vector2d a = f.col(0), b = f.col(1);
    const Eigen::Vector2d e = b - a;
    const double len2 = e.squaredNorm();
    const double t = (x.head<2>() - a).dot(e) / len2;
    const Eigen::Vector2d proj = a + t * e;
    return t > -tol && t < 1.0 + tol && (x.head<2>() - proj).norm() <= tol * std::sqrt(len2);
  }
  const Eigen::Vector3d a = f.col(0), b = f.col(1), c = f.col(2);
  const Eigen::Vector3d n = (b - a).cross(c - a);
  const double area2 = n.norm();
  const double scale = std::max({(b - a).norm(), (c - a).norm(), (c - b).norm()});
  if (std::abs(n.dot(x.head<3>() - a)) / area2 > tol * scale) return false;
  const Eigen::Vector3d p = x.head<3>();
  const double l0 = n.dot((b - p).cross(c - p)) / (area2 * area2);
  const double l1 = n.dot((c - p).cross(a - p)) / (area2 * area2);
  const double l2 = n.dot((a - p).cross(b - p)) / (area2 * area2);
  return l0 > -tol && l1 > -tol && l2 > -tol;
}

}  // namespace

std::string_view to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Clamped: return "clamped";
    case BoundaryTag::SimplySupported: return "simply_supported";
    case BoundaryTag::Free: return "free";
  }
  return "free";
}

BoundaryTag parse_boundary_tag(std::string_view word) {
  if (word == "clamped") return BoundaryTag::Clamped;
  if (word == "simply_supported") return BoundaryTag::SimplySupported;
  if (word == "free") return BoundaryTag::Free;
  throw std::invalid_argument("unknown boundary tag '" + std::string(word) + "'");
}

double SimplicialMesh::signed_volume(int c) const {
  Eigen::MatrixXd pts(dim, dim + 1);
  for (int k = 0; k <= dim; ++k) pts.col(k) = vertices.col(cells(k, c));
  return simplex_signed_volume(pts);
}

double SimplicialMesh::total_volume() const {
  double v = 0.0;
  for (int c = 0; c < num_cells(); ++c) v += signed_volume(c);
  return v;
}

void tag_boundary(SimplicialMesh& mesh, const FacetTagger& tagger) {
  const auto table = facet_table(mesh);
  // deterministic order: by owning cell, then local facet
  std::vector<std::pair<std::pair<int, int>, std::vector<int>>> ordered;
  for (const auto& [key, use] : table)
    if (use.count == 1) ordered.push_back({{use.cell, use.local}, cell_facet(mesh, use.cell, use.local)});
  std::sort(ordered.begin(), ordered.end());
  mesh.boundary_facets.resize(mesh.dim, static_cast<Eigen::Index>(ordered.size()));
  mesh.boundary_tags.clear();
  for (std::size_t f = 0; f < ordered.size(); ++f) {
    const auto& ids = ordered[f].second;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(mesh.dim);
    for (int k = 0; k < mesh.dim; ++k) {
      mesh.boundary_facets(k, static_cast<Eigen::Index>(f)) = ids[static_cast<std::size_t>(k)];
      centroid += mesh.vertices.col(ids[static_cast<std::size_t>(k)]);
    }
    centroid /= mesh.dim;
    mesh.boundary_tags.push_back(tagger(centroid));
  }
}

void tag_boundary(SimplicialMesh& mesh, BoundaryTag tag) {
  tag_boundary(mesh, [tag](const Eigen::VectorXd&) { return tag; });
}

SimplicialMesh generate_unit_square_mesh(int n, BoundaryTag tag) {
  if (n < 1) throw std::invalid_argument("generate_unit_square_mesh: n must be >= 1");
  SimplicialMesh m;
  m.dim = 2;
  const int nv = (n + 1) * (n + 1);
  m.vertices.resize(2, nv);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) m.vertices.col(j * (n + 1) + i) << static_cast<double>(i) / n, static_cast<double>(j) / n;
  m.cells.resize(3, 2 * n * n);
  int c = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = j * (n + 1) + i, v10 = v00 + 1, v01 = v00 + n + 1, v11 = v01 + 1;
      m.cells.col(c++) << v00, v10, v11;
      m.cells.col(c++) << v00, v11, v01;
    }
  }
  tag_boundary(m, tag);
  return m;
}

SimplicialMesh generate_freudenthal_mesh(int m, BoundaryTag tag) {
  if (m < 1) throw std::invalid_argument("generate_freudenthal_mesh: m must be >= 1");
  SimplicialMesh mesh;
  mesh.dim = 3;
  const int n1 = m + 1;
  mesh.vertices.resize(3, n1 * n1 * n1);
  auto vid = [n1](int i, int j, int k) { return (k * n1 + j) * n1 + i; };
  for (int k = 0; k <= m; ++k)
    for (int j = 0; j <= m; ++j)
      for (int i = 0; i <= m; ++i)
        mesh.vertices.col(vid(i, j, k)) << static_cast<double>(i) / m, static_cast<double>(j) / m,
            static_cast<double>(k) / m;
  constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<std::vector<int>> cells;
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m; ++i) {
        for (const auto& perm : perms) {
          std::array<int, 3> x{i, j, k};
          std::vector<int> cell{vid(x[0], x[1], x[2])};
          for (int s = 0; s < 3; ++s) {
            ++x[static_cast<std::size_t>(perm[s])];
            cell.push_back(vid(x[0], x[1], x[2]));
          }
          orient_positive(cell, mesh.vertices);
          cells.push_back(cell);
        }
      }
    }
  }
  mesh = assemble(3, mesh.vertices, mesh.num_vertices(), cells);
  tag_boundary(mesh, tag);
  return mesh;
}

SimplicialMesh perturb_interior_vertices(const SimplicialMesh& mesh, double amplitude, std::uint64_t seed) {
  if (!(amplitude >= 0.0 && amplitude < 0.5)) throw std::invalid_argument("perturbation amplitude must lie in [0, 1/2)");
  const int nv = mesh.num_vertices(), d = mesh.dim;
  std::vector<bool> on_boundary(static_cast<std::size_t>(nv), false);
  for (int f = 0; f < mesh.num_boundary_facets(); ++f)
    for (int k = 0; k < d; ++k) on_boundary[static_cast<std::size_t>(mesh.boundary_facets(k, f))] = true;
  std::vector<double> shortest(static_cast<std::size_t>(nv), std::numeric_limits<double>::infinity());
  for (int c = 0; c < mesh.num_cells(); ++c)
    for (int i = 0; i <= d; ++i)
      for (int j = 0; j <= d; ++j) {
        if (i == j) continue;
        const int a = mesh.cells(i, c), b = mesh.cells(j, c);
        const double len = (mesh.vertices.col(a) - mesh.vertices.col(b)).norm();
        shortest[static_cast<std::size_t>(a)] = std::min(shortest[static_cast<std::size_t>(a)], len);
      }
  // raw engine output keeps the offsets identical across standard library implementations
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() { return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0; };
  SimplicialMesh out = mesh;
  for (int v = 0; v < nv; ++v) {
    if (on_boundary[static_cast<std::size_t>(v)]) continue;
    for (int k = 0; k < d; ++k) out.vertices(k, v) += amplitude * shortest[static_cast<std::size_t>(v)] * uniform();
  }
  for (int c = 0; c < out.num_cells(); ++c)
    if (!(out.signed_volume(c) > 0.0)) throw std::runtime_error("perturbation inverted cell " + std::to_string(c));
  return out;
}

SimplicialMesh alfeld_split(const SimplicialMesh& mesh) {
  const int d = mesh.dim;
  Eigen::MatrixXd verts = mesh.vertices;
  int nv = mesh.num_vertices();
  std::vector<std::vector<int>> cells;
  cells.reserve(static_cast<std::size_t>(mesh.num_cells() * (d + 1)));
  for (int c = 0; c < mesh.num_cells(); ++c) {
    Eigen::VectorXd bary = Eigen::VectorXd::Zero(d);
    for (int k = 0; k <= d; ++k) bary += mesh.vertices.col(mesh.cells(k, c));
    bary /= (d + 1);
    const int b = append_vertex(verts, nv, bary);
    for (int i = 0; i <= d; ++i) {
      std::vector<int> sub(static_cast<std::size_t>(d + 1));
      for (int k = 0; k <= d; ++k) sub[static_cast<std::size_t>(k)] = (k == i) ? b : mesh.cells(k, c);
      cells.push_back(sub);
    }
  }
  SimplicialMesh out = assemble(d, verts, nv, cells);
  out.boundary_facets = mesh.boundary_facets;
  out.boundary_tags = mesh.boundary_tags;
  return out;
}

SimplicialMesh worsey_farin_split(const SimplicialMesh& mesh) {
  if (mesh.dim != 3) throw std::invalid_argument("worsey_farin_split: requires a 3D tetrahedral mesh");
  Eigen::MatrixXd verts = mesh.vertices;
  int nv = mesh.num_vertices();

  // incenters: vertices weighted by the area of the opposite face
  std::vector<Eigen::Vector3d> incenter(static_cast<std::size_t>(mesh.num_cells()));
  for (int c = 0; c < mesh.num_cells(); ++c) {
    Eigen::Vector3d num = Eigen::Vector3d::Zero();
    double den = 0.0;
    for (int i = 0; i < 4; ++i) {
      const auto f = cell_facet(mesh, c, i);
      const Eigen::Vector3d a = mesh.vertices.col(f[0]), b = mesh.vertices.col(f[1]), cc = mesh.vertices.col(f[2]);
      const double area = 0.5 * (b - a).cross(cc - a).norm();
      num += area * Eigen::Vector3d(mesh.vertices.col(mesh.cells(i, c)));
      den += area;
    }
    incenter[static_cast<std::size_t>(c)] = num / den;
  }
  std::vector<int> incenter_id(static_cast<std::size_t>(mesh.num_cells()));
  for (int c = 0; c < mesh.num_cells(); ++c)
    incenter_id[static_cast<std::size_t>(c)] = append_vertex(verts, nv, incenter[static_cast<std::size_t>(c)]);

  // facet split points: line between neighbouring incenters cut with the shared facet,
  // facet barycenter on the boundary
  std::map<FacetKey, std::vector<int>> adjacency;
  for (int c = 0; c < mesh.num_cells(); ++c)
    for (int i = 0; i < 4; ++i) {
      const auto f = cell_facet(mesh, c, i);
      adjacency[make_key(f.data(), 3)].push_back(c);
    }
  std::map<FacetKey, int> split_id;
  for (const auto& [key, adj] : adjacency) {
    const Eigen::Vector3d a = mesh.vertices.col(key[0]), b = mesh.vertices.col(key[1]), cc = mesh.vertices.col(key[2]);
    Eigen::Vector3d point = (a + b + cc) / 3.0;
    if (adj.size() == 2) {
      const Eigen::Vector3d i1 = incenter[static_cast<std::size_t>(adj[0])];
      const Eigen::Vector3d i2 = incenter[static_cast<std::size_t>(adj[1])];
      const Eigen::Vector3d n = (b - a).cross(cc - a);
      const double t = n.dot(a - i1) / n.dot(i2 - i1);
      point = i1 + t * (i2 - i1);
    }
    split_id[key] = append_vertex(verts, nv, point);
  }

  std::vector<std::vector<int>> cells;
  cells.reserve(static_cast<std::size_t>(12 * mesh.num_cells()));
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int i = 0; i < 4; ++i) {
      const auto f = cell_facet(mesh, c, i);
      const int s = split_id.at(make_key(f.data(), 3));
      for (int e = 0; e < 3; ++e) {
        std::vector<int> sub{incenter_id[static_cast<std::size_t>(c)], f[static_cast<std::size_t>(e)],
                             f[static_cast<std::size_t>((e + 1) % 3)], s};
        orient_positive(sub, verts);
        cells.push_back(sub);
      }
    }
  }
  SimplicialMesh out = assemble(3, verts, nv, cells);
  out.boundary_facets.resize(3, 3 * mesh.num_boundary_facets());
  for (int f = 0; f < mesh.num_boundary_facets(); ++f) {
    const int ids[3] = {mesh.boundary_facets(0, f), mesh.boundary_facets(1, f), mesh.boundary_facets(2, f)};
    const int s = split_id.at(make_key(ids, 3));
    for (int e = 0; e < 3; ++e) {
      out.boundary_facets.col(3 * f + e) << ids[e], ids[(e + 1) % 3], s;
      out.boundary_tags.push_back(mesh.boundary_tags[static_cast<std::size_t>(f)]);
    }
  }
  return out;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  auto dump = [&os](const char* what, const std::vector<std::string>& items) {
    for (const auto& s : items) os << what << ": " << s << '\n';
  };
  dump("orientation", orientation);
  dump("conformity", conformity);
  dump("boundary", boundary);
  return os.str();
}

ValidationReport validate_mesh(const SimplicialMesh& mesh) {
  ValidationReport report;
  const int d = mesh.dim;
  const int nv = mesh.num_vertices();
  if (d != 2 && d != 3) {
    report.conformity.push_back("unsupported dimension " + std::to_string(d));
    return report;
  }
  bool indices_ok = true;
  for (int c = 0; c < mesh.num_cells(); ++c)
    for (int k = 0; k <= d; ++k)
      if (mesh.cells(k, c) < 0 || mesh.cells(k, c) >= nv) {
        report.conformity.push_back("cell " + std::to_string(c) + ": vertex index out of range");
        indices_ok = false;
      }
  for (int f = 0; f < mesh.num_boundary_facets(); ++f)
    for (int k = 0; k < d; ++k)
      if (mesh.boundary_facets(k, f) < 0 || mesh.boundary_facets(k, f) >= nv) {
        report.boundary.push_back("boundary facet " + std::to_string(f) + ": vertex index out of range");
        indices_ok = false;
      }
  if (static_cast<int>(mesh.boundary_tags.size()) != mesh.num_boundary_facets()) {
    report.boundary.push_back("boundary facet count does not match tag count");
  }
  if (!indices_ok) return report;

  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double vol = mesh.signed_volume(c);
    if (!(vol > 0.0)) {
      std::ostringstream os;
      os << "cell " << c << " has non-positive volume " << vol;
      report.orientation.push_back(os.str());
    }
  }

  const auto table = facet_table(mesh);
  for (const auto& [key, use] : table) {
    if (use.count > 2) {
      std::ostringstream os;
      os << "facet (" << key[0] << "," << key[1];
      if (d == 3) os << "," << key[2];
      os << ") shared by " << use.count << " cells";
      report.conformity.push_back(os.str());
    }
  }

  // boundary facets vs. facets with a single adjacent cell
  std::map<FacetKey, int> tagged;
  for (int f = 0; f < mesh.num_boundary_facets(); ++f) {
    const auto key = make_key(mesh.boundary_facets.col(f).data(), d);
    if (++tagged[key] > 1) report.boundary.push_back("boundary facet " + std::to_string(f) + " listed more than once");
    const auto it = table.find(key);
    if (it == table.end()) {
      report.boundary.push_back("boundary facet " + std::to_string(f) + " is not a facet of any cell");
    } else if (it->second.count != 1) {
      report.boundary.push_back("boundary facet " + std::to_string(f) + " is an interior facet");
    }
  }
  for (const auto& [key, use] : table) {
    if (use.count == 1 && !tagged.count(key)) {
      std::ostringstream os;
      os << "untagged boundary facet of cell " << use.cell;
      report.boundary.push_back(os.str());
    }
  }

  // hanging vertices: a vertex inside an unmatched facet signals a T-junction
  double extent = 0.0;
  for (int k = 0; k < d; ++k) extent = std::max(extent, mesh.vertices.row(k).maxCoeff() - mesh.vertices.row(k).minCoeff());
  const double tol = 1e-10;
  std::vector<int> by_x(static_cast<std::size_t>(nv));
  std::iota(by_x.begin(), by_x.end(), 0);
  std::sort(by_x.begin(), by_x.end(), [&](int a, int b) { return mesh.vertices(0, a) < mesh.vertices(0, b); });
  for (const auto& [key, use] : table) {
    if (use.count != 1) continue;
    const std::vector<int> ids(key.begin(), key.begin() + d);
    const Eigen::MatrixXd f = gather(mesh, ids);
    const double xmin = f.row(0).minCoeff() - tol * extent, xmax = f.row(0).maxCoeff() + tol * extent;
    auto lo = std::lower_bound(by_x.begin(), by_x.end(), xmin,
                               [&](int v, double x) { return mesh.vertices(0, v) < x; });
    for (auto it = lo; it != by_x.end() && mesh.vertices(0, *it) <= xmax; ++it) {
      const int v = *it;
      if (std::find(ids.begin(), ids.end(), v) != ids.end()) continue;
      if (point_in_facet(f, mesh.vertices.col(v), tol)) {
        report.conformity.push_back("vertex " + std::to_string(v) + " lies on unmatched facet of cell " +
                                    std::to_string(use.cell) + " (hanging node)");
      }
    }
  }
  return report;
}

std::vector<MeshFacet> mesh_facets(const SimplicialMesh& mesh) {
  std::map<FacetKey, MeshFacet> table;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int i = 0; i <= mesh.dim; ++i) {
      const auto f = cell_facet(mesh, c, i);
      const auto key = make_key(f.data(), mesh.dim);
      auto& entry = table[key];
      entry.vertices = key;
      const int slot = entry.cells[0] < 0 ? 0 : 1;
      if (entry.cells[1] >= 0) throw std::runtime_error("facet shared by more than two cells");
      entry.cells[static_cast<std::size_t>(slot)] = c;
      entry.local[static_cast<std::size_t>(slot)] = i;
    }
  }
  std::vector<MeshFacet> out;
  out.reserve(table.size());
  for (auto& [key, facet] : table) out.push_back(facet);
  return out;
}

int find_vertex(const SimplicialMesh& mesh, const Eigen::VectorXd& x, double tol) {
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if ((mesh.vertices.col(v) - x).norm() <= tol) return v;
  return -1;
}

}  // namespace c1free
