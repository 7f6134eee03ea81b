#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "c1free/vtk.hpp"

using namespace c1free;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_after(const std::string& text, const std::string& key) {
  const auto pos = text.find(key);
  if (pos == std::string::npos) return -1;
  return std::stoi(text.substr(pos + key.size()));
}

}  // namespace

TEST_CASE("subcell counts and field layout") {
  const auto dir = std::filesystem::temp_directory_path() / "c1free_vtk_test";
  std::filesystem::create_directories(dir);
  for (int dim : {2, 3}) {
    const auto mesh = std::make_shared<const SimplicialMesh>(dim == 2 ? generate_unit_square_mesh(2, BoundaryTag::Free)
                                                                      : generate_freudenthal_mesh(1, BoundaryTag::Free));
    const int p = 3;
    const LagrangeSpace s(mesh, p, 1), v(mesh, p - 1, dim);
    const Eigen::VectorXd w = s.interpolate_scalar([](const Eigen::VectorXd& x) { return x[0]; });
    const Eigen::VectorXd g = Eigen::VectorXd::Ones(v.num_dofs());
    const auto path = dir / ("out" + std::to_string(dim) + ".vtk");
    write_vtk(path, *mesh, p, {{"w", &s, w}, {"gamma", &v, g}});
    const std::string text = slurp(path);
    const int sub = dim == 2 ? p * p : p * p * p;
    const int lattice = dim == 2 ? (p + 1) * (p + 2) / 2 : (p + 1) * (p + 2) * (p + 3) / 6;
    CHECK(text.rfind("# vtk DataFile Version 3.0", 0) == 0);
    CHECK(count_after(text, "POINTS ") == lattice * mesh->num_cells());
    CHECK(count_after(text, "CELLS ") == sub * mesh->num_cells());
    CHECK(count_after(text, "CELL_TYPES ") == sub * mesh->num_cells());
    CHECK(count_after(text, "POINT_DATA ") == lattice * mesh->num_cells());
    CHECK(text.find("SCALARS w double 1") != std::string::npos);
    CHECK(text.find("VECTORS gamma double") != std::string::npos);
  }
  // subcells tile each cell: their volumes add up to the domain volume
  const SimplicialMesh sq = generate_unit_square_mesh(1, BoundaryTag::Free);
  const auto path = dir / "tile.vtk";
  write_vtk(path, sq, 4, {});
  std::ifstream in(path);
  std::string line;
  std::vector<Eigen::Vector2d> pts;
  while (std::getline(in, line) && line.rfind("POINTS", 0) != 0) {}
  const int np = std::stoi(line.substr(7));
  for (int k = 0; k < np; ++k) {
    double x, y, z;
    in >> x >> y >> z;
    pts.emplace_back(x, y);
  }
  std::string key;
  int ncells = 0, total = 0;
  in >> key >> ncells >> total;
  double area = 0.0;
  for (int c = 0; c < ncells; ++c) {
    int n, a, b, d;
    in >> n >> a >> b >> d;
    const Eigen::Vector2d e1 = pts[static_cast<std::size_t>(b)] - pts[static_cast<std::size_t>(a)];
    const Eigen::Vector2d e2 = pts[static_cast<std::size_t>(d)] - pts[static_cast<std::size_t>(a)];
    const double signed_area = 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
    CHECK(signed_area > 0.0);
    area += signed_area;
  }
  CHECK(area == doctest::Approx(1.0).epsilon(1e-14));
  std::filesystem::remove_all(dir);
}

TEST_CASE("invalid output requests") {
  const auto mesh = std::make_shared<const SimplicialMesh>(generate_unit_square_mesh(1, BoundaryTag::Free));
  const LagrangeSpace s(mesh, 2, 1);
  const auto path = std::filesystem::temp_directory_path() / "c1free_bad.vtk";
  CHECK_THROWS_AS(write_vtk(path, *mesh, 0, {}), std::invalid_argument);
  CHECK_THROWS_AS(write_vtk(path, *mesh, 2, {{"w", &s, Eigen::VectorXd::Zero(2)}}), std::invalid_argument);
  CHECK_THROWS_AS(write_vtk(path, *mesh, 2, {{"w", nullptr, Eigen::VectorXd()}}), std::invalid_argument);
  std::filesystem::remove(path);
}
