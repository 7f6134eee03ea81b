#include <doctest.h>

#include <cmath>

#include "c1free/fespace.hpp"

using namespace c1free;

namespace {

std::shared_ptr<const SimplicialMesh> square(int n, BoundaryTag tag) {
  return std::make_shared<const SimplicialMesh>(generate_unit_square_mesh(n, tag));
}

std::shared_ptr<const SimplicialMesh> cube(int m, BoundaryTag tag) {
  return std::make_shared<const SimplicialMesh>(generate_freudenthal_mesh(m, tag));
}

}  // namespace

TEST_CASE("node counts of continuous Lagrange spaces") {
  for (int n : {1, 3})
    for (int p = 1; p <= 6; ++p) {
      const LagrangeSpace s(square(n, BoundaryTag::Free), p, 1);
      CHECK(s.num_nodes() == (n * p + 1) * (n * p + 1));
      const LagrangeSpace v(square(n, BoundaryTag::Free), p, 2);
      CHECK(v.num_dofs() == 2 * s.num_nodes());
    }
  for (int p = 1; p <= 4; ++p) CHECK(LagrangeSpace(cube(2, BoundaryTag::Free), p, 1).num_nodes() == (2 * p + 1) * (2 * p + 1) * (2 * p + 1));
  CHECK(LagrangeSpace(square(2, BoundaryTag::Free), 0, 2).num_dofs() == 2);
}

TEST_CASE("shared nodes coincide geometrically") {
  const auto mesh = std::make_shared<const SimplicialMesh>(
      perturb_interior_vertices(generate_unit_square_mesh(3, BoundaryTag::Free), 0.2, 3));
  const LagrangeSpace s(mesh, 5, 1);
  for (int c = 0; c < mesh->num_cells(); ++c) {
    const CellGeometry g = cell_geometry(*mesh, c);
    const Eigen::MatrixXd phys = g.to_physical(s.basis().nodes());
    for (int a = 0; a < s.nodes_per_cell(); ++a)
      CHECK((phys.col(a) - s.node_coords().col(s.cell_nodes()(a, c))).norm() < 1e-13);
  }
}

TEST_CASE("interpolation is exact for polynomials and fields are continuous") {
  const auto mesh = std::make_shared<const SimplicialMesh>(
      perturb_interior_vertices(generate_freudenthal_mesh(2, BoundaryTag::Free), 0.2, 4));
  const int p = 4;
  const LagrangeSpace s(mesh, p, 1);
  auto f = [](const Eigen::VectorXd& x) { return x[0] * x[0] * x[1] * x[2] - 3.0 * x[1] * x[1] + x[2]; };
  const Eigen::VectorXd u = s.interpolate_scalar(f);
  Eigen::MatrixXd ref(3, 2);
  ref << 0.1, 0.3, 0.2, 0.1, 0.3, 0.25;
  for (int c = 0; c < mesh->num_cells(); ++c) {
    const BasisTableau t = eval_field(s, u, c, ref, 1);
    const Eigen::MatrixXd x = cell_geometry(*mesh, c).to_physical(ref);
    for (int k = 0; k < 2; ++k) {
      CHECK(t.values(k, 0) == doctest::Approx(f(x.col(k))).epsilon(1e-12));
      CHECK(t.gradients[0](k, 0) == doctest::Approx(2 * x(0, k) * x(1, k) * x(2, k)).epsilon(1e-10));
    }
  }
}

TEST_CASE("scalar constraints remove the boundary nodes of constrained facets") {
  const int n = 3, p = 4;
  for (BoundaryTag t : {BoundaryTag::Clamped, BoundaryTag::SimplySupported}) {
    const LagrangeSpace s(square(n, t), p, 1);
    const ConstraintSet cs = build_scalar_constraints(s);
    CHECK(cs.eliminated() == 4 * n * p);
  }
  const ConstraintSet free = build_scalar_constraints(LagrangeSpace(square(n, BoundaryTag::Free), p, 1));
  CHECK(free.eliminated() == 0);
}

TEST_CASE("vector constraints: full on clamped, normal only on simply supported") {
  const int n = 2, q = 3;
  const LagrangeSpace clamped(square(n, BoundaryTag::Clamped), q, 2);
  CHECK(build_vector_constraints(clamped).eliminated() == 2 * 4 * n * q);
  const LagrangeSpace ss(square(n, BoundaryTag::SimplySupported), q, 2);
  const ConstraintSet cs = build_vector_constraints(ss);
  // one tangential component per boundary node, both at the four corners
  CHECK(cs.eliminated() == 4 * n * q + 4);
  const Eigen::MatrixXd ZtZ = Eigen::MatrixXd(cs.Z.transpose() * cs.Z);
  CHECK((ZtZ - Eigen::MatrixXd::Identity(ZtZ.rows(), ZtZ.cols())).cwiseAbs().maxCoeff() < 1e-14);

  // simply supported on y = 0 and y = 1 only: (0, 1 + x) is normal there
  SimplicialMesh mixed = generate_unit_square_mesh(n, BoundaryTag::Free);
  tag_boundary(mixed, [](const Eigen::VectorXd& c) {
    return (std::abs(c[1]) < 1e-12 || std::abs(c[1] - 1) < 1e-12) ? BoundaryTag::SimplySupported : BoundaryTag::Free;
  });
  const LagrangeSpace ms(std::make_shared<const SimplicialMesh>(mixed), q, 2);
  const ConstraintSet mcs = build_vector_constraints(ms);
  CHECK(mcs.eliminated() == 2 * (n * q + 1));
  const Eigen::VectorXd g = ms.interpolate([](const Eigen::VectorXd& x) { return Eigen::Vector2d(0.0, 1.0 + x[0]).eval(); });
  const Eigen::VectorXd back = mcs.Z * (mcs.Z.transpose() * g);
  CHECK((back - g).norm() < 1e-13);
}

TEST_CASE("3D simply supported vector constraints keep the normal component") {
  const LagrangeSpace v(cube(1, BoundaryTag::SimplySupported), 2, 3);
  const ConstraintSet cs = build_vector_constraints(v);
  const Eigen::MatrixXd ZtZ = Eigen::MatrixXd(cs.Z.transpose() * cs.Z);
  CHECK((ZtZ - Eigen::MatrixXd::Identity(ZtZ.rows(), ZtZ.cols())).cwiseAbs().maxCoeff() < 1e-13);
  // grad of the cubic bubble is normal to every face, so its nodal values are admissible
  const Eigen::VectorXd g = v.interpolate([](const Eigen::VectorXd& x) {
    const double a = x[0] * (1 - x[0]), b = x[1] * (1 - x[1]), c = x[2] * (1 - x[2]);
    return Eigen::Vector3d((1 - 2 * x[0]) * b * c, a * (1 - 2 * x[1]) * c, a * b * (1 - 2 * x[2])).eval();
  });
  CHECK((cs.Z * (cs.Z.transpose() * g) - g).norm() < 1e-13);
  // corners and cube-edge midpoints lose all three components, face-diagonal midpoints two
  CHECK(cs.eliminated() == 8 * 3 + 12 * 3 + 6 * 2);
}
