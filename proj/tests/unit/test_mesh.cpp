#include <doctest.h>

#include <sstream>

#include "c1free/mesh.hpp"

using namespace c1free;

TEST_CASE("generated meshes are valid and fill the unit domain") {
  for (int n : {1, 2, 5}) {
    const SimplicialMesh sq = generate_unit_square_mesh(n, BoundaryTag::Clamped);
    CHECK(validate_mesh(sq).ok());
    CHECK(sq.num_cells() == 2 * n * n);
    CHECK(sq.num_boundary_facets() == 4 * n);
    CHECK(sq.total_volume() == doctest::Approx(1.0).epsilon(1e-14));
  }
  for (int m : {1, 2, 3}) {
    const SimplicialMesh cube = generate_freudenthal_mesh(m, BoundaryTag::Free);
    CHECK(validate_mesh(cube).ok());
    CHECK(cube.num_cells() == 6 * m * m * m);
    CHECK(cube.num_boundary_facets() == 12 * m * m);
    CHECK(cube.total_volume() == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("macro splits keep validity, volume and tags") {
  const SimplicialMesh sq = alfeld_split(generate_unit_square_mesh(2, BoundaryTag::SimplySupported));
  CHECK(validate_mesh(sq).ok());
  CHECK(sq.num_cells() == 24);
  CHECK(sq.total_volume() == doctest::Approx(1.0));
  const SimplicialMesh al = alfeld_split(generate_freudenthal_mesh(1, BoundaryTag::Clamped));
  CHECK(validate_mesh(al).ok());
  CHECK(al.num_cells() == 24);
  const SimplicialMesh wf = worsey_farin_split(generate_freudenthal_mesh(2, BoundaryTag::Clamped));
  CHECK(validate_mesh(wf).ok());
  CHECK(wf.num_cells() == 12 * 48);
  CHECK(wf.total_volume() == doctest::Approx(1.0).epsilon(1e-12));
  for (BoundaryTag t : wf.boundary_tags) CHECK(t == BoundaryTag::Clamped);
  CHECK_THROWS_AS(worsey_farin_split(generate_unit_square_mesh(1, BoundaryTag::Free)), std::invalid_argument);
}

TEST_CASE("mesh file round trip is bit exact") {
  for (const SimplicialMesh& mesh : {perturb_interior_vertices(generate_unit_square_mesh(5, BoundaryTag::Clamped), 0.3, 9),
                                     worsey_farin_split(generate_freudenthal_mesh(1, BoundaryTag::SimplySupported))}) {
    std::stringstream ss;
    write_mesh(mesh, ss);
    const SimplicialMesh back = read_mesh(ss);
    CHECK(back.dim == mesh.dim);
    CHECK((back.vertices.array() == mesh.vertices.array()).all());
    CHECK((back.cells.array() == mesh.cells.array()).all());
    CHECK((back.boundary_facets.array() == mesh.boundary_facets.array()).all());
    CHECK(back.boundary_tags == mesh.boundary_tags);
  }
}

TEST_CASE("malformed mesh files are rejected with a line number") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_mesh(in);
  };
  CHECK_THROWS_WITH_AS(parse("not-a-mesh 1 2 3 1 0\n"), doctest::Contains("line 1"), std::runtime_error);
  const std::string head = "c1free-mesh 1 2 3 1 3\n0 0\n1 0\n0 1\n";
  CHECK_THROWS_WITH_AS(parse(head + "0 1 7\n0 1 free\n1 2 free\n2 0 free\n"), doctest::Contains("index out of range"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse(head + "0 1 2\n0 1 free\n1 2 glued\n2 0 free\n"), doctest::Contains("glued"), std::runtime_error);
  // a clockwise cell fails validation
  CHECK_THROWS_WITH_AS(parse(head + "0 2 1\n0 1 free\n1 2 free\n2 0 free\n"), doctest::Contains("validation"),
                       std::runtime_error);
  CHECK_NOTHROW(parse(head + "0 1 2\n0 1 free\n1 2 clamped\n2 0 simply_supported\n"));
}

TEST_CASE("validation reports hanging vertices and missing boundary facets") {
  SimplicialMesh mesh = generate_unit_square_mesh(2, BoundaryTag::Free);
  mesh.boundary_facets.conservativeResize(Eigen::NoChange, mesh.num_boundary_facets() - 1);
  mesh.boundary_tags.pop_back();
  CHECK_FALSE(validate_mesh(mesh).boundary.empty());
  SimplicialMesh flipped = generate_unit_square_mesh(1, BoundaryTag::Free);
  std::swap(flipped.cells(1, 0), flipped.cells(2, 0));
  CHECK_FALSE(validate_mesh(flipped).orientation.empty());
}

TEST_CASE("facet adjacency and vertex lookup") {
  const SimplicialMesh mesh = generate_unit_square_mesh(3, BoundaryTag::Free);
  const auto facets = mesh_facets(mesh);
  int interior = 0;
  for (const MeshFacet& f : facets) interior += f.interior();
  CHECK(static_cast<int>(facets.size()) == 3 * 9 + 2 * 3);
  CHECK(static_cast<int>(facets.size()) - interior == mesh.num_boundary_facets());
  CHECK(find_vertex(mesh, Eigen::Vector2d(2.0 / 3.0, 1.0 / 3.0)) >= 0);
  CHECK(find_vertex(mesh, Eigen::Vector2d(0.66, 0.33)) == -1);
}

TEST_CASE("vertex perturbation is deterministic and keeps the boundary") {
  const SimplicialMesh base = generate_unit_square_mesh(6, BoundaryTag::SimplySupported);
  const SimplicialMesh a = perturb_interior_vertices(base, 0.25, 5), b = perturb_interior_vertices(base, 0.25, 5);
  const SimplicialMesh c = perturb_interior_vertices(base, 0.25, 6);
  CHECK((a.vertices.array() == b.vertices.array()).all());
  CHECK_FALSE((a.vertices.array() == c.vertices.array()).all());
  CHECK(validate_mesh(a).ok());
  CHECK(a.total_volume() == doctest::Approx(1.0).epsilon(1e-13));
  for (int f = 0; f < a.num_boundary_facets(); ++f)
    for (int k = 0; k < 2; ++k) {
      const int v = a.boundary_facets(k, f);
      CHECK((a.vertices.col(v) - base.vertices.col(v)).norm() == 0.0);
    }
  CHECK_THROWS_AS(perturb_interior_vertices(base, 0.6, 1), std::invalid_argument);
}
