#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "c1free/problems.hpp"
#include "c1free/verify.hpp"

using namespace c1free;

namespace {

using MeshPtr = std::shared_ptr<const SimplicialMesh>;

MeshPtr share(SimplicialMesh m) { return std::make_shared<const SimplicialMesh>(std::move(m)); }

}  // namespace

TEST_CASE("plate material") {
  const PlateMaterial steel;
  CHECK(steel.D() == doctest::Approx(2.1e11 * 1e-6 / (12 * 0.91)));
  CHECK_NOTHROW(steel.validate());
  PlateMaterial bad = steel;
  bad.nu = 0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = steel;
  bad.rho = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("sine product derivatives") {
  for (int dim : {2, 3}) {
    const ScalarFunction s = sine_product(dim);
    Eigen::VectorXd x(dim);
    for (int k = 0; k < dim; ++k) x[k] = 0.13 + 0.21 * k;
    const double h = 1e-5;
    for (int k = 0; k < dim; ++k) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
      e[k] = h;
      CHECK((s.value(x + e) - s.value(x - e)) / (2 * h) == doctest::Approx(s.gradient(x)[k]).epsilon(1e-8));
      const Eigen::VectorXd dg = (s.gradient(x + e) - s.gradient(x - e)) / (2 * h);
      CHECK((dg - s.hessian(x).col(k)).norm() < 1e-7);
    }
  }
}

TEST_CASE("static plate") {
  const auto mesh = share(generate_unit_square_mesh(4, BoundaryTag::SimplySupported));
  const int z = nearest_vertex(*mesh, Eigen::Vector2d(0.66, 0.33));
  CHECK((mesh->vertices.col(z) - Eigen::Vector2d(0.75, 0.25)).norm() < 1e-14);

  const ProblemRun zero = solve_plate_static(mesh, 5, PlateMaterial{}, 0.0, z, {1e3, 1e-8, 100});
  CHECK(zero.report.converged);
  CHECK(zero.report.iterations <= 1);
  CHECK(zero.report.w.norm() == 0.0);

  const PenaltyOptions opt{1e3, 1e-8, 100};
  const ProblemRun run = solve_plate_static(mesh, 5, PlateMaterial{}, 1e3, z, opt);
  CHECK(run.report.converged);
  CHECK(run.report.iterations <= 8);
  CHECK(c1_jump(run.scalar_space(), run.report.w) <= 1e-6);
  CHECK(gradient_mismatch(run.scalar_space(), run.report.w, run.vector_space(), run.report.gamma) <= 10 * opt.tol);
  // the load pushes the plate in its own direction
  CHECK(run.report.w[run.scalar_space().vertex_node(z)] > 0.0);

  CHECK_THROWS_AS(solve_plate_static(mesh, 1, PlateMaterial{}, 1.0, z, opt), std::invalid_argument);
  CHECK_THROWS_AS(solve_plate_static(mesh, 3, PlateMaterial{}, 1.0, -1, opt), std::invalid_argument);
  CHECK_THROWS_AS(solve_plate_static(share(generate_freudenthal_mesh(1, BoundaryTag::Free)), 3, PlateMaterial{}, 1.0, 0, opt),
                  std::invalid_argument);
}

TEST_CASE("projection problem iteration counts") {
  const PenaltyOptions opt{1e4, 1e-8, 100};
  const ProblemRun a = solve_projection_3d(1, 8, opt);
  CHECK(a.report.converged);
  CHECK(a.report.iterations == 2);
  CHECK(a.error_rel_h2 < 1e-2);
  const ProblemRun b = solve_projection_3d(2, 3, opt);
  CHECK(b.report.converged);
  CHECK(b.report.iterations == 4);
  // p = 2 on the Freudenthal mesh: only low order C1 fields survive
  const ProblemRun c = solve_projection_3d(2, 2, opt);
  CHECK(c.error_rel_h2 > 0.5);
  CHECK_THROWS_AS(solve_projection_3d(0, 3, opt), std::invalid_argument);
}

TEST_CASE("projection error does not depend on the cell order") {
  const SimplicialMesh base = generate_freudenthal_mesh(1, BoundaryTag::Free);
  SimplicialMesh shuffled = base;
  std::vector<int> order(static_cast<std::size_t>(base.num_cells()));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937(3));
  for (int c = 0; c < base.num_cells(); ++c) shuffled.cells.col(c) = base.cells.col(order[static_cast<std::size_t>(c)]);
  const PenaltyOptions opt{1e4, 1e-10, 100};
  const double e0 = solve_projection_3d(share(base), 4, opt).error_rel_h2;
  const double e1 = solve_projection_3d(share(shuffled), 4, opt).error_rel_h2;
  CHECK(std::abs(e0 - e1) <= 1e-9);
}

TEST_CASE("general fourth-order problem") {
  const auto mesh = share(generate_unit_square_mesh(2, BoundaryTag::Clamped));
  const PenaltyOptions opt{1e3, 1e-12, 100};
  auto one = [](const Eigen::VectorXd&) { return 1.0; };
  const ProblemRun sym = solve_general_fourth_order(mesh, 5, Eigen::Vector2d(0, 0), one, opt);
  const ProblemRun tiny = solve_general_fourth_order(mesh, 5, Eigen::Vector2d(1e-13, 0), one, opt);
  CHECK(sym.system->symmetric);
  CHECK_FALSE(tiny.system->symmetric);
  CHECK(sym.report.converged);
  CHECK(relative_h1_difference(sym.scalar_space(), tiny.report.w, sym.report.w) <= 1e-9);

  const ProblemRun zero = solve_general_fourth_order(mesh, 5, Eigen::Vector2d(1, 0), [](const Eigen::VectorXd&) { return 0.0; }, opt);
  CHECK(zero.report.w.norm() == 0.0);

  const ProblemRun conv = solve_general_fourth_order(mesh, 5, Eigen::Vector2d(1, 0), one, opt);
  CHECK(conv.report.converged);
  const OracleResult o = oracle_conforming_solve(*conv.system);
  REQUIRE(o.solved);
  CHECK(relative_h1_difference(conv.scalar_space(), conv.report.w, o.w) <= 1e-8);
  const ProblemRun split = solve_general_fourth_order(mesh, 5, Eigen::Vector2d(1, 0), one, opt, Splitting::MassInA);
  CHECK(relative_h1_difference(conv.scalar_space(), split.report.w, conv.report.w) <= 1e-7);
}

TEST_CASE("L2 projection") {
  const auto mesh = share(perturb_interior_vertices(generate_unit_square_mesh(2, BoundaryTag::Free), 0.2, 8));
  auto q = [](const Eigen::VectorXd& x) { return 1.0 + x[0] - 2 * x[0] * x[1] + 0.5 * x[1] * x[1]; };
  // q is in W, so one solve suffices; round-off grows with lambda since only lambda P controls gamma
  const ProblemRun run = l2_project(mesh, 3, q, {1e3, 1e-12, 100});
  CHECK(run.report.converged);
  const Eigen::VectorXd exact = run.scalar_space().interpolate_scalar(q);
  CHECK((run.report.w - exact).cwiseAbs().maxCoeff() <= 1e-9);
  const ProblemRun zero = l2_project(mesh, 4, [](const Eigen::VectorXd&) { return 0.0; }, {2e4, 1e-8, 100});
  CHECK(zero.report.w.norm() == 0.0);
}

TEST_CASE("Newmark stepping") {
  const auto mesh = share(generate_unit_square_mesh(3, BoundaryTag::SimplySupported));
  const MixedSpaces spaces = build_mixed_spaces(mesh, 4);
  const PlateMaterial steel;

  NewmarkConfig cfg;
  cfg.steps = 5;
  const NewmarkResult rest = newmark_run(spaces, steel, cfg, Eigen::VectorXd::Zero(spaces.scalar->num_dofs()),
                                         Eigen::VectorXd::Zero(spaces.vector->num_dofs()));
  for (double e : rest.energy_gamma) CHECK(e == 0.0);
  CHECK(rest.w.norm() == 0.0);

  const int z = nearest_vertex(*mesh, Eigen::Vector2d(0.66, 0.33));
  const ProblemRun s = solve_plate_static(mesh, 4, steel, 1e3, z, {1e3, 1e-10, 100});
  REQUIRE(s.report.converged);

  // conservation needs the initial acceleration consistent with the equation of motion
  cfg.steps = 20;
  cfg.penalty.tol = 1e-10;
  cfg.project_initial_acceleration = true;
  const NewmarkResult cons = newmark_run(spaces, steel, cfg, s.report.w, s.report.gamma);
  CHECK(cons.energy_gamma.size() == 21);
  CHECK(cons.energy_gamma.front() > 0.0);
  CHECK(energy_deviation(cons.energy_gamma) <= 1e-5);
  for (int it : cons.iterations) CHECK(it <= 6);

  NewmarkConfig diss = cfg;
  diss.delta = 0.6;
  diss.beta = 0.3025;
  const NewmarkResult d = newmark_run(spaces, steel, diss, s.report.w, s.report.gamma);
  for (std::size_t n = 1; n < d.energy_gamma.size(); ++n) CHECK(d.energy_gamma[n] <= d.energy_gamma[n - 1] * (1 + 1e-8));
  CHECK(d.energy_gamma.back() < d.energy_gamma.front());

  CHECK(cons.initial_converged);
  CHECK(cons.initial_iterations >= 1);

  NewmarkConfig starved = cfg;
  starved.penalty.max_iter = 1;
  starved.penalty.tol = 1e-30;
  try {
    newmark_run(spaces, steel, starved, s.report.w, s.report.gamma);
    FAIL("expected divergence");
  } catch (const NewmarkDivergence& e) {
    CHECK(e.step() == 1);
  }
  CHECK_THROWS_AS(newmark_run(spaces, steel, cfg, Eigen::VectorXd::Zero(3), s.report.gamma), std::invalid_argument);
}

TEST_CASE("two-field scheme differs from the conforming solution") {
  const auto mesh = share(generate_unit_square_mesh(2, BoundaryTag::SimplySupported));
  const double pi4 = std::pow(std::numbers::pi, 4);
  auto source = [pi4](const Eigen::VectorXd& x) { return 4 * pi4 * std::sin(std::numbers::pi * x[0]) * std::sin(std::numbers::pi * x[1]); };

  const CiarletRaviartResult zero = ciarlet_raviart_baseline(mesh, 5, [](const Eigen::VectorXd&) { return 0.0; });
  CHECK(zero.w.norm() == 0.0);
  CHECK(zero.sigma.norm() == 0.0);

  // the scheme as stated solves lap^2 w = -g
  const CiarletRaviartResult cr = ciarlet_raviart_baseline(mesh, 5, [&](const Eigen::VectorXd& x) { return -source(x); });
  const LagrangeSpace& s = *cr.space;
  const ConstraintSet cs = build_scalar_constraints(s);
  const Eigen::VectorXd r = cs.Z.transpose() * (assemble_form(FormKind::ScalarMass, s, s) * cr.sigma +
                                                assemble_form(FormKind::ScalarStiffness, s, s) * cr.w);
  CHECK(r.cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(broken_h2_error(s, cr.w, sine_product(2)).relative < 0.05);

  const MixedSpaces spaces = build_mixed_spaces(mesh, 5);
  const PenaltySystem sys =
      build_penalty_system(spaces, {{FormKind::DivDiv}}, {}, assemble_source(*spaces.scalar, source), {});
  const SolveReport ip = iterated_penalty_solve(sys, {1e3, 1e-12, 100});
  const OracleResult o = oracle_conforming_solve(sys);
  REQUIRE(ip.converged);
  REQUIRE(o.solved);
  const double ip_gap = relative_h1_difference(*spaces.scalar, ip.w, o.w);
  const double cr_gap = relative_h1_difference(*spaces.scalar, cr.w, o.w);
  CHECK(cr_gap > 10 * ip_gap);
  CHECK(cr_gap > 1e-4);

  CHECK_THROWS_AS(ciarlet_raviart_baseline(share(generate_unit_square_mesh(2, BoundaryTag::Clamped)), 3, source),
                  std::invalid_argument);
}
