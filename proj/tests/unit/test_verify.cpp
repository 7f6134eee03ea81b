#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "c1free/problems.hpp"
#include "c1free/verify.hpp"

using namespace c1free;

namespace {

using MeshPtr = std::shared_ptr<const SimplicialMesh>;

MeshPtr share(SimplicialMesh m) { return std::make_shared<const SimplicialMesh>(std::move(m)); }

MeshPtr single_simplex(int dim) {
  SimplicialMesh m;
  m.dim = dim;
  m.vertices = Eigen::MatrixXd::Zero(dim, dim + 1);
  m.cells.resize(dim + 1, 1);
  for (int k = 0; k < dim; ++k) m.vertices(k, k + 1) = 1.0;
  for (int k = 0; k <= dim; ++k) m.cells(k, 0) = k;
  tag_boundary(m, BoundaryTag::Free);
  return share(std::move(m));
}

// Random vertex numbering and a cyclic shift of each cell's vertices (orientation preserving in 2D).
SimplicialMesh relabel(const SimplicialMesh& mesh, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<int> perm(static_cast<std::size_t>(mesh.num_vertices()));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> cell_order(static_cast<std::size_t>(mesh.num_cells()));
  std::iota(cell_order.begin(), cell_order.end(), 0);
  std::shuffle(cell_order.begin(), cell_order.end(), rng);
  SimplicialMesh out = mesh;
  for (int v = 0; v < mesh.num_vertices(); ++v) out.vertices.col(perm[static_cast<std::size_t>(v)]) = mesh.vertices.col(v);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const int src = cell_order[static_cast<std::size_t>(c)];
    for (int k = 0; k <= mesh.dim; ++k) out.cells(k, c) = perm[static_cast<std::size_t>(mesh.cells((k + 1) % (mesh.dim + 1), src))];
  }
  for (int f = 0; f < mesh.num_boundary_facets(); ++f)
    for (int k = 0; k < mesh.dim; ++k) out.boundary_facets(k, f) = perm[static_cast<std::size_t>(mesh.boundary_facets(k, f))];
  return out;
}

SimplicialMesh rigid_motion(SimplicialMesh mesh, double angle, const Eigen::Vector2d& shift) {
  const Eigen::Matrix2d R = Eigen::Rotation2Dd(angle).toRotationMatrix();
  mesh.vertices = (R * mesh.vertices).colwise() + shift;
  return mesh;
}

}  // namespace

TEST_CASE("kernel dimensions of single simplices are full polynomial spaces") {
  CHECK(kernel_dimension(single_simplex(2), 4).dimension == 15);
  CHECK(kernel_dimension(single_simplex(2), 5).dimension == 21);
  CHECK(kernel_dimension(single_simplex(3), 3).dimension == 20);
  CHECK(kernel_dimension_by_jumps(single_simplex(2), 4).dimension == 15);
  CHECK(kernel_dimension_by_jumps(single_simplex(3), 3).dimension == 20);
}

TEST_CASE("the two kernel oracles agree") {
  const auto two = share(generate_unit_square_mesh(1, BoundaryTag::Free));
  CHECK(kernel_dimension(two, 1).dimension == 3);
  for (int p = 1; p <= 6; ++p) {
    const KernelDimension a = kernel_dimension(two, p), b = kernel_dimension_by_jumps(two, p);
    CHECK(a.dimension == b.dimension);
    CHECK_FALSE(a.borderline);
  }
  for (BoundaryTag t : {BoundaryTag::Free, BoundaryTag::SimplySupported, BoundaryTag::Clamped}) {
    const auto sq = share(generate_unit_square_mesh(2, t));
    for (int p = 3; p <= 5; ++p) CHECK(kernel_dimension(sq, p).dimension == kernel_dimension_by_jumps(sq, p).dimension);
  }
  const auto cube = share(generate_freudenthal_mesh(1, BoundaryTag::Free));
  CHECK(kernel_dimension(cube, 3).dimension == kernel_dimension_by_jumps(cube, 3).dimension);
}

TEST_CASE("macro splits carry low degree C1 fields") {
  // the Clough-Tocher space on one split triangle: 12 = 3 * (value + gradient) + 3 normal derivatives
  SimplicialMesh tri;
  tri.dim = 2;
  tri.vertices.resize(2, 3);
  tri.vertices << 0, 1, 0, 0, 0, 1;
  tri.cells.resize(3, 1);
  tri.cells << 0, 1, 2;
  tag_boundary(tri, BoundaryTag::Free);
  CHECK(kernel_dimension(share(alfeld_split(tri)), 3).dimension == 12);
}

TEST_CASE("kernel dimension is invariant under relabeling and rigid motions") {
  const SimplicialMesh base = perturb_interior_vertices(generate_unit_square_mesh(2, BoundaryTag::SimplySupported), 0.2, 2);
  for (int p : {3, 4}) {
    const int ref = kernel_dimension(share(base), p).dimension;
    CHECK(kernel_dimension(share(relabel(base, 5)), p).dimension == ref);
    CHECK(kernel_dimension(share(rigid_motion(base, 0.7, {3.0, -2.0})), p).dimension == ref);
    CHECK(kernel_dimension_by_jumps(share(relabel(base, 6)), p).dimension == ref);
  }
}

TEST_CASE("oracle basis fields are C1") {
  const auto mesh = share(generate_unit_square_mesh(2, BoundaryTag::Free));
  const MixedSpaces spaces = build_mixed_spaces(mesh, 4);
  const PenaltySystem sys = build_penalty_system(spaces, {}, {{FormKind::ScalarMass}}, {}, {});
  const OracleResult o = oracle_conforming_solve(sys);
  REQUIRE(o.dimension() == kernel_dimension(mesh, 4).dimension);
  for (int k = 0; k < o.dimension(); ++k) CHECK(c1_jump(*spaces.scalar, spaces.scalar_constraints.Z * o.basis.col(k)) <= 1e-8);
  // zero data: solved with the zero field
  CHECK(o.solved);
  CHECK(o.w.norm() == 0.0);
}

TEST_CASE("trivial kernel with nonzero data is reported") {
  const auto mesh = share(generate_unit_square_mesh(2, BoundaryTag::Clamped));
  const MixedSpaces spaces = build_mixed_spaces(mesh, 3);
  const Eigen::VectorXd f = assemble_source(*spaces.scalar, [](const Eigen::VectorXd&) { return 1.0; });
  const OracleResult o = oracle_conforming_solve(build_penalty_system(spaces, {{FormKind::DivDiv}}, {}, f, {}));
  CHECK(o.dimension() == 0);
  CHECK_FALSE(o.solved);
}

TEST_CASE("c1_jump on known fields") {
  const auto mesh = share(generate_unit_square_mesh(2, BoundaryTag::Free));
  const LagrangeSpace s(mesh, 3, 1);
  CHECK(c1_jump(s, s.interpolate_scalar([](const Eigen::VectorXd& x) { return 2 * x[0] - x[1]; })) < 1e-12);
  CHECK(c1_jump(s, s.interpolate_scalar([](const Eigen::VectorXd& x) { return std::abs(x[0] - 0.5); })) ==
        doctest::Approx(2.0).epsilon(1e-10));
  CHECK(c1_jump(s, Eigen::VectorXd::Constant(s.num_dofs(), 3.0)) == 0.0);
}

TEST_CASE("broken Sobolev errors") {
  const ScalarFunction w = sine_product(2);
  const auto mesh = share(generate_unit_square_mesh(2, BoundaryTag::Free));
  const LagrangeSpace s(mesh, 3, 1);
  ScalarFunction cubic;
  cubic.value = [](const Eigen::VectorXd& x) { return x[0] * x[0] * x[1]; };
  cubic.gradient = [](const Eigen::VectorXd& x) { return Eigen::Vector2d(2 * x[0] * x[1], x[0] * x[0]).eval(); };
  cubic.hessian = [](const Eigen::VectorXd& x) { return (Eigen::Matrix2d() << 2 * x[1], 2 * x[0], 2 * x[0], 0).finished().eval(); };
  CHECK(broken_h2_error(s, s.interpolate_scalar(cubic.value), cubic).absolute < 1e-12);
  CHECK(broken_h2_error(s, Eigen::VectorXd::Zero(s.num_dofs()), w).relative == doctest::Approx(1.0).epsilon(1e-14));

  const int p = 6;
  std::vector<double> errors;
  for (int n : {4, 8}) {
    const LagrangeSpace sp(share(generate_unit_square_mesh(n, BoundaryTag::Free)), p, 1);
    errors.push_back(broken_h2_error(sp, sp.interpolate_scalar(w.value), w).relative);
  }
  const double ratio = errors[0] / errors[1];
  CHECK(ratio > 0.8 * std::pow(2.0, p - 1));
  CHECK(ratio < 1.25 * std::pow(2.0, p - 1));

  // H0 and H1 parts
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(s.num_dofs());
  CHECK(broken_sobolev_norm(s, one, 0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(broken_sobolev_norm(s, one, 2) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(relative_h1_difference(s, one, one) == 0.0);
  CHECK_THROWS_AS(broken_sobolev_norm(s, one, 3), std::invalid_argument);
}

TEST_CASE("gradient mismatch") {
  const auto mesh = share(generate_unit_square_mesh(2, BoundaryTag::Free));
  const MixedSpaces spaces = build_mixed_spaces(mesh, 3);
  const Eigen::VectorXd w = spaces.scalar->interpolate_scalar([](const Eigen::VectorXd& x) { return x[0] * x[1]; });
  const Eigen::VectorXd g = spaces.vector->interpolate([](const Eigen::VectorXd& x) { return Eigen::Vector2d(x[1], x[0]).eval(); });
  CHECK(gradient_mismatch(*spaces.scalar, w, *spaces.vector, g) < 1e-13);
  CHECK(gradient_mismatch(*spaces.scalar, w, *spaces.vector, Eigen::VectorXd::Zero(g.size())) ==
        doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("convergence slopes") {
  CHECK(convergence_slope({0.5, 0.25, 0.125}, {0.25, 0.0625, 0.015625}) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(convergence_slope({1, 0.5, 0.25}, {3, 3, 3})) < 1e-14);
  CHECK_THROWS_AS(convergence_slope({1}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(convergence_slope({1, 0.5}, {1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(convergence_slope({0.5, 0.5}, {1, 2}), std::invalid_argument);
}

TEST_CASE("energy deviation") {
  CHECK(energy_deviation({2, 2, 2}) == 0.0);
  CHECK(energy_deviation({1, 1.01}) == doctest::Approx(0.01));
  CHECK(energy_deviation({1, 0.99, 1.005}) == doctest::Approx(0.01));
  CHECK(std::isinf(energy_deviation({0, 1e-30})));
  CHECK(energy_deviation({0, 0}) == 0.0);
}
