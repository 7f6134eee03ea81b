#include "c1free/vtk.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iomanip>
#include <map>
#include <stdexcept>

namespace c1free {

namespace {

// Lattice points {0 <= u_1 <= ... <= u_d <= n} are in bijection with the simplex lattice through
// i_1 = u_1, i_k = u_k - u_{k-1}. Kuhn simplices of the unit cubes that stay inside this ordered
// region triangulate it, which gives the subcells.
struct Lattice {
  std::vector<std::array<int, 3>> points;  // simplex lattice indices
  std::vector<std::array<int, 4>> cells;   // indices into points
};

Lattice build_lattice(int dim, int n) {
  Lattice lat;
  std::map<std::array<int, 3>, int> index;
  auto to_simplex = [dim](const std::array<int, 3>& u) {
    std::array<int, 3> s{0, 0, 0};
    for (int k = 0; k < dim; ++k) s[static_cast<std::size_t>(k)] = u[static_cast<std::size_t>(k)] - (k ? u[static_cast<std::size_t>(k - 1)] : 0);
    return s;
  };
  auto ordered = [dim, n](const std::array<int, 3>& u) {
    for (int k = 0; k < dim; ++k) {
      const int hi = k + 1 < dim ? u[static_cast<std::size_t>(k + 1)] : n;
      if (u[static_cast<std::size_t>(k)] < 0 || u[static_cast<std::size_t>(k)] > hi) return false;
    }
    return true;
  };
  auto point = [&](const std::array<int, 3>& u) {
    const auto [it, inserted] = index.try_emplace(u, static_cast<int>(lat.points.size()));
    if (inserted) lat.points.push_back(to_simplex(u));
    return it->second;
  };
  std::array<int, 3> perm{0, 1, 2};
  std::vector<std::array<int, 3>> perms;
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.begin() + dim));
  std::array<int, 3> base{0, 0, 0};
  const int nb = dim == 2 ? n * n : n * n * n;
  for (int b = 0; b < nb; ++b) {
    base = {b % n, (b / n) % n, dim == 3 ? b / (n * n) : 0};
    for (const auto& pm : perms) {
      std::array<std::array<int, 3>, 4> verts{};
      verts[0] = base;
      for (int k = 0; k < dim; ++k) {
        verts[static_cast<std::size_t>(k + 1)] = verts[static_cast<std::size_t>(k)];
        ++verts[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(pm[static_cast<std::size_t>(k)])];
      }
      bool inside = true;
      for (int k = 0; k <= dim; ++k) inside = inside && ordered(verts[static_cast<std::size_t>(k)]);
      if (!inside) continue;
      std::array<int, 4> cell{-1, -1, -1, -1};
      for (int k = 0; k <= dim; ++k) cell[static_cast<std::size_t>(k)] = point(verts[static_cast<std::size_t>(k)]);
      // the map u -> i reverses orientation for some permutations; keep every subcell positive
      Eigen::Matrix3d E = Eigen::Matrix3d::Identity();
      const auto& p0 = lat.points[static_cast<std::size_t>(cell[0])];
      for (int k = 1; k <= dim; ++k)
        for (int i = 0; i < dim; ++i)
          E(i, k - 1) = lat.points[static_cast<std::size_t>(cell[static_cast<std::size_t>(k)])][static_cast<std::size_t>(i)] - p0[static_cast<std::size_t>(i)];
      if (E.determinant() < 0.0) std::swap(cell[0], cell[1]);
      lat.cells.push_back(cell);
    }
  }
  return lat;
}

}  // namespace

void write_vtk(const std::filesystem::path& path, const SimplicialMesh& mesh, int subdivision,
               const std::vector<VtkField>& fields) {
  if (subdivision < 1) throw std::invalid_argument("VTK subdivision must be at least 1");
  for (const VtkField& f : fields) {
    if (!f.space) throw std::invalid_argument("VTK field '" + f.name + "' has no space");
    if (&f.space->mesh() != &mesh) throw std::invalid_argument("VTK field '" + f.name + "' lives on another mesh");
    if (f.coefficients.size() != f.space->num_dofs()) throw std::invalid_argument("VTK field '" + f.name + "' has the wrong length");
  }
  const int d = mesh.dim;
  const Lattice lat = build_lattice(d, subdivision);
  const auto np = static_cast<Eigen::Index>(lat.points.size());
  Eigen::MatrixXd ref(d, np);
  for (Eigen::Index q = 0; q < np; ++q)
    for (int k = 0; k < d; ++k) ref(k, q) = static_cast<double>(lat.points[static_cast<std::size_t>(q)][static_cast<std::size_t>(k)]) / subdivision;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  out << "# vtk DataFile Version 3.0\nc1free\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  const Eigen::Index total = np * mesh.num_cells();
  out << "POINTS " << total << " double\n";
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Eigen::MatrixXd x = cell_geometry(mesh, c).to_physical(ref);
    for (Eigen::Index q = 0; q < np; ++q) out << x(0, q) << ' ' << x(1, q) << ' ' << (d == 3 ? x(2, q) : 0.0) << '\n';
  }
  const auto nsub = static_cast<Eigen::Index>(lat.cells.size());
  out << "CELLS " << nsub * mesh.num_cells() << ' ' << nsub * mesh.num_cells() * (d + 2) << '\n';
  for (int c = 0; c < mesh.num_cells(); ++c)
    for (const auto& sc : lat.cells) {
      out << d + 1;
      for (int k = 0; k <= d; ++k) out << ' ' << c * np + sc[static_cast<std::size_t>(k)];
      out << '\n';
    }
  out << "CELL_TYPES " << nsub * mesh.num_cells() << '\n';
  for (Eigen::Index k = 0; k < nsub * mesh.num_cells(); ++k) out << (d == 2 ? 5 : 10) << '\n';
  if (fields.empty()) return;
  out << "POINT_DATA " << total << '\n';
  for (const VtkField& f : fields) {
    const int vd = f.space->value_dim();
    if (vd == 1) {
      out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
    } else {
      out << "VECTORS " << f.name << " double\n";
    }
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const BasisTableau t = eval_field(*f.space, f.coefficients, c, ref, 0);
      for (Eigen::Index q = 0; q < np; ++q) {
        if (vd == 1) {
          out << t.values(q, 0) << '\n';
        } else {
          for (int i = 0; i < 3; ++i) out << (i < vd ? t.values(q, i) : 0.0) << (i < 2 ? ' ' : '\n');
        }
      }
    }
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace c1free
