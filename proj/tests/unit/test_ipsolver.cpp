#include <doctest.h>

#include <cmath>
#include <random>

#include "c1free/ipsolver.hpp"

using namespace c1free;

namespace {

Eigen::VectorXd random_vector(int n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

PenaltySystem plate_like(int n, int p, BoundaryTag tag, InnerProductWeights w = {}) {
  auto mesh = std::make_shared<const SimplicialMesh>(perturb_interior_vertices(generate_unit_square_mesh(n, tag), 0.2, 1));
  const MixedSpaces spaces = build_mixed_spaces(mesh, p);
  const Eigen::VectorXd f2 = assemble_source(*spaces.scalar, [](const Eigen::VectorXd& x) { return 1.0 + x[0]; });
  return build_penalty_system(spaces, {{FormKind::Kirchhoff}}, {}, f2, {}, w);
}

}  // namespace

TEST_CASE("mixed spaces have degrees p and p - 1") {
  auto mesh = std::make_shared<const SimplicialMesh>(generate_unit_square_mesh(2, BoundaryTag::Clamped));
  const MixedSpaces s = build_mixed_spaces(mesh, 4);
  CHECK(s.scalar->degree() == 4);
  CHECK(s.vector->degree() == 3);
  CHECK(s.vector->value_dim() == 2);
  CHECK_THROWS_AS(build_mixed_spaces(mesh, 0), std::invalid_argument);
}

TEST_CASE("P is positive semidefinite and its energy is the quadrature residual") {
  std::mt19937 rng(17);
  for (InnerProductWeights w : {InnerProductWeights{1, 1}, InnerProductWeights{1, 0}, InnerProductWeights{0.3, 2.0}}) {
    const PenaltySystem sys = plate_like(3, 4, BoundaryTag::SimplySupported, w);
    for (int k = 0; k < 100; ++k) {
      const Eigen::VectorXd x = random_vector(sys.size(), rng);
      const double e = x.dot(sys.P * x);
      CHECK(e >= -1e-12 * x.squaredNorm());
      CHECK(residual_norm(sys, x) == doctest::Approx(std::sqrt(std::max(e, 0.0))).epsilon(1e-9));
    }
  }
}

TEST_CASE("grad w lies in the kernel of P when gamma = grad w") {
  auto mesh = std::make_shared<const SimplicialMesh>(generate_unit_square_mesh(3, BoundaryTag::Free));
  const MixedSpaces spaces = build_mixed_spaces(mesh, 3);
  const PenaltySystem sys = build_penalty_system(spaces, {}, {{FormKind::ScalarMass}}, {}, {});
  Eigen::VectorXd x(sys.size());
  x.head(sys.num_scalar()) = spaces.scalar->interpolate_scalar([](const Eigen::VectorXd& z) { return z[0] * z[0] * z[1]; });
  x.tail(sys.num_vector()) = spaces.vector->interpolate(
      [](const Eigen::VectorXd& z) { return Eigen::Vector2d(2 * z[0] * z[1], z[0] * z[0]).eval(); });
  CHECK(residual_norm(sys, x) < 1e-13);
  CHECK((sys.P * x).norm() < 1e-11);
}

TEST_CASE("iterations converge, and the converged field is C1") {
  const PenaltySystem sys = plate_like(3, 5, BoundaryTag::SimplySupported);
  const SolveReport r = iterated_penalty_solve(sys, {1e3, 1e-10, 50});
  CHECK(r.converged);
  CHECK(r.iterations == static_cast<int>(r.residuals.size()));
  CHECK(r.final_residual() < 1e-10);
  // residuals contract
  for (std::size_t k = 1; k < r.residuals.size(); ++k) CHECK(r.residuals[k] < r.residuals[k - 1]);
  CHECK(r.w.size() == sys.spaces.scalar->num_dofs());
  CHECK(r.gamma.size() == sys.spaces.vector->num_dofs());
}

TEST_CASE("zero data gives the zero solution after one solve") {
  auto mesh = std::make_shared<const SimplicialMesh>(generate_unit_square_mesh(2, BoundaryTag::Clamped));
  const MixedSpaces spaces = build_mixed_spaces(mesh, 4);
  const PenaltySystem sys = build_penalty_system(spaces, {{FormKind::DivDiv}}, {{FormKind::ScalarMass}}, {}, {});
  const SolveReport r = iterated_penalty_solve(sys, {});
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.w.norm() == 0.0);
}

TEST_CASE("one factorization serves several right-hand sides") {
  const PenaltySystem sys = plate_like(2, 4, BoundaryTag::Clamped);
  const IteratedPenaltySolver solver(sys, 1e3);
  const SolveReport a = solver.solve(sys.F, 1e-10, 50);
  const SolveReport b = solver.solve(2.0 * sys.F, 1e-10, 50);
  CHECK(a.converged);
  CHECK(b.converged);
  CHECK((b.w - 2.0 * a.w).norm() <= 1e-6 * a.w.norm());
  // warm start from the converged multiplier finishes at once
  const SolveReport c = solver.solve(sys.F, 1e-8, 50, a.multiplier);
  CHECK(c.iterations <= 2);
}

TEST_CASE("invalid parameters throw") {
  const PenaltySystem sys = plate_like(1, 3, BoundaryTag::Clamped);
  CHECK_THROWS_AS(IteratedPenaltySolver(sys, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(IteratedPenaltySolver(sys, -1.0), std::invalid_argument);
  const IteratedPenaltySolver solver(sys, 10.0);
  CHECK_THROWS_AS(solver.solve(sys.F, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(solver.solve(sys.F, 1e-8, 0), std::invalid_argument);
  CHECK_THROWS_AS(solver.solve(Eigen::VectorXd::Ones(3), 1e-8, 10), std::invalid_argument);
  CHECK_THROWS_AS(residual_norm(sys, Eigen::VectorXd::Ones(2)), std::invalid_argument);
  CHECK_THROWS_AS(build_penalty_system(sys.spaces, {}, {}, {}, {}, {0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_penalty_system(sys.spaces, {}, {}, {}, {}, {-1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_penalty_system(sys.spaces, {}, {}, Eigen::VectorXd::Ones(2), {}), std::invalid_argument);
}
