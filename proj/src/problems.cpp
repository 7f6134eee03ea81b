#include "c1free/problems.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "c1free/linalg.hpp"
#include "c1free/quadrature.hpp"
#include "c1free/verify.hpp"

namespace c1free {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

ProblemRun run(const MixedSpaces& spaces, const FormSum& a, const FormSum& c, const Eigen::VectorXd& f2,
               const Eigen::VectorXd& f1, InnerProductWeights weights, const PenaltyOptions& options,
               Clock::time_point t0) {
  ProblemRun out;
  out.system = std::make_shared<const PenaltySystem>(build_penalty_system(spaces, a, c, f2, f1, weights));
  out.report = iterated_penalty_solve(*out.system, options);
  out.wall_ms = ms_since(t0);
  return out;
}

void require_mesh(const std::shared_ptr<const SimplicialMesh>& mesh) {
  if (!mesh) throw std::invalid_argument("mesh is null");
}

}  // namespace

void PlateMaterial::validate() const {
  if (!(nu > 0.0 && nu < 0.5)) throw std::invalid_argument("Poisson ratio must lie in (0, 1/2)");
  if (!(E > 0.0) || !(tau > 0.0) || !(rho > 0.0)) throw std::invalid_argument("E, tau and rho must be positive");
}

FormSum plate_form(const PlateMaterial& material, double scale) {
  FormParams params;
  params.D = material.D();
  params.nu = material.nu;
  return {FormTerm{FormKind::Kirchhoff, scale, params}};
}

int nearest_vertex(const SimplicialMesh& mesh, const Eigen::VectorXd& z) {
  if (z.size() != mesh.dim) throw std::invalid_argument("point dimension does not match the mesh");
  if (mesh.num_vertices() == 0) throw std::invalid_argument("mesh has no vertices");
  Eigen::Index best = 0;
  (mesh.vertices.colwise() - z).colwise().squaredNorm().minCoeff(&best);
  return static_cast<int>(best);
}

ProblemRun solve_plate_static(std::shared_ptr<const SimplicialMesh> mesh, int p, const PlateMaterial& material,
                              double load, int vertex, const PenaltyOptions& options) {
  const auto t0 = Clock::now();
  require_mesh(mesh);
  material.validate();
  if (mesh->dim != 2) throw std::invalid_argument("plate problems need a 2D mesh");
  if (p < 2) throw std::invalid_argument("plate problems need p >= 2");
  if (vertex < 0 || vertex >= mesh->num_vertices()) throw std::invalid_argument("load vertex out of range");
  const MixedSpaces spaces = build_mixed_spaces(mesh, p);
  const double D = material.D();
  const Eigen::VectorXd f2 = assemble_point_load(*spaces.scalar, vertex, load / D);
  return run(spaces, plate_form(material, 1.0 / D), {}, f2, {}, {1.0, 1.0}, options, t0);
}

ScalarFunction sine_product(int dim) {
  constexpr double pi = std::numbers::pi;
  auto parts = [dim](const Eigen::VectorXd& x) {
    Eigen::ArrayXd s(dim), c(dim);
    for (int k = 0; k < dim; ++k) {
      s[k] = std::sin(pi * x[k]);
      c[k] = std::cos(pi * x[k]);
    }
    return std::pair{s, c};
  };
  ScalarFunction f;
  f.value = [parts](const Eigen::VectorXd& x) { return parts(x).first.prod(); };
  f.gradient = [parts, dim](const Eigen::VectorXd& x) {
    const auto [s, c] = parts(x);
    Eigen::VectorXd g(dim);
    for (int k = 0; k < dim; ++k) {
      double v = pi * c[k];
      for (int j = 0; j < dim; ++j)
        if (j != k) v *= s[j];
      g[k] = v;
    }
    return g;
  };
  f.hessian = [parts, dim](const Eigen::VectorXd& x) {
    const auto [s, c] = parts(x);
    Eigen::MatrixXd H(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        if (i == j) {
          H(i, j) = -pi * pi * s.prod();
          continue;
        }
        double v = pi * pi * c[i] * c[j];
        for (int k = 0; k < dim; ++k)
          if (k != i && k != j) v *= s[k];
        H(i, j) = v;
      }
    return H;
  };
  return f;
}

ProblemRun solve_projection_3d(std::shared_ptr<const SimplicialMesh> mesh, int p, const PenaltyOptions& options) {
  const auto t0 = Clock::now();
  require_mesh(mesh);
  if (mesh->dim != 3) throw std::invalid_argument("projection problem needs a 3D mesh");
  if (p < 2) throw std::invalid_argument("projection problem needs p >= 2");
  const MixedSpaces spaces = build_mixed_spaces(mesh, p);
  const ScalarFunction w = sine_product(3);
  const FormSum a{{FormKind::VectorGradient}};
  const FormSum c{{FormKind::ScalarStiffness}, {FormKind::ScalarMass}};
  const Eigen::VectorXd f1 = assemble_form_against_field(a, gradient_jet(w), *spaces.vector);
  const Eigen::VectorXd f2 = assemble_form_against_field(c, scalar_jet(w), *spaces.scalar);
  ProblemRun out = run(spaces, a, c, f2, f1, {1.0, 1.0}, options, t0);
  out.error_rel_h2 = broken_h2_error(*spaces.scalar, out.report.w, w).relative;
  out.wall_ms = ms_since(t0);
  return out;
}

ProblemRun solve_projection_3d(int m, int p, const PenaltyOptions& options) {
  if (m < 1 || m > 8) throw std::invalid_argument("projection problem needs 1 <= m <= 8");
  return solve_projection_3d(std::make_shared<const SimplicialMesh>(generate_freudenthal_mesh(m, BoundaryTag::Free)),
                             p, options);
}

ProblemRun solve_general_fourth_order(std::shared_ptr<const SimplicialMesh> mesh, int p, const Eigen::VectorXd& b,
                                      const std::function<double(const Eigen::VectorXd&)>& f,
                                      const PenaltyOptions& options, Splitting splitting, InnerProductWeights weights) {
  const auto t0 = Clock::now();
  require_mesh(mesh);
  if (b.size() != mesh->dim) throw std::invalid_argument("convection vector must have one entry per dimension");
  const MixedSpaces spaces = build_mixed_spaces(mesh, p);
  FormSum a{{FormKind::DivDiv}}, c;
  if (splitting == Splitting::Standard) {
    c.push_back({FormKind::ScalarStiffness});
  } else {
    a.push_back({FormKind::VectorMass});
  }
  if (b.cwiseAbs().maxCoeff() > 0.0) {
    FormParams params;
    params.b = b;
    c.push_back({FormKind::Convection, 1.0, params});
  }
  c.push_back({FormKind::ScalarMass});
  const Eigen::VectorXd f2 = assemble_source(*spaces.scalar, f);
  return run(spaces, a, c, f2, {}, weights, options, t0);
}

ProblemRun l2_project(const MixedSpaces& spaces, const Eigen::VectorXd& f2, const Eigen::VectorXd& f1,
                      const PenaltyOptions& options, InnerProductWeights weights) {
  return run(spaces, {}, {{FormKind::ScalarMass}}, f2, f1, weights, options, Clock::now());
}

ProblemRun l2_project(std::shared_ptr<const SimplicialMesh> mesh, int p,
                      const std::function<double(const Eigen::VectorXd&)>& g, const PenaltyOptions& options,
                      InnerProductWeights weights) {
  const auto t0 = Clock::now();
  require_mesh(mesh);
  const MixedSpaces spaces = build_mixed_spaces(mesh, p);
  ProblemRun out = l2_project(spaces, assemble_source(*spaces.scalar, g), {}, options, weights);
  out.wall_ms = ms_since(t0);
  return out;
}

void NewmarkConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (beta < 0.0 || delta < 0.0) throw std::invalid_argument("Newmark parameters must be non-negative");
  if (steps < 0) throw std::invalid_argument("step count must be non-negative");
}

double plate_energy_of_gradient(const LagrangeSpace& scalar, const Eigen::VectorXd& w, const PlateMaterial& material) {
  const SimplicialMesh& mesh = scalar.mesh();
  const int d = mesh.dim;
  const QuadratureRule rule = simplex_rule(d, std::max(2 * scalar.degree(), 1));
  const double D = material.D(), nu = material.nu;
  double total = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geom = cell_geometry(mesh, c);
    const BasisTableau f = eval_field(scalar, w, c, rule.points, 2);
    for (int q = 0; q < rule.size(); ++q) {
      double frob = 0.0, trace = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          const double h = f.hessians[static_cast<std::size_t>(i * d + j)](q, 0);
          frob += h * h;
          if (i == j) trace += h;
        }
      total += rule.weights[q] * std::abs(geom.detJ) * D * ((1.0 - nu) * frob + nu * trace * trace);
    }
  }
  return total;
}

NewmarkResult newmark_run(const MixedSpaces& spaces, const PlateMaterial& material, const NewmarkConfig& cfg,
                          const Eigen::VectorXd& w0, const Eigen::VectorXd& gamma0) {
  const auto t0 = Clock::now();
  material.validate();
  cfg.validate();
  const LagrangeSpace& W = *spaces.scalar;
  const LagrangeSpace& V = *spaces.vector;
  if (w0.size() != W.num_dofs() || gamma0.size() != V.num_dofs()) {
    throw std::invalid_argument("initial fields do not match the spaces");
  }
  const double rt = material.rho * material.tau;
  const double dt = cfg.dt, beta = cfg.beta, delta = cfg.delta;
  const SparseMatrix As = assemble_form(plate_form(material), V, V);
  const SparseMatrix Ms = assemble_form(FormKind::ScalarMass, W, W);

  NewmarkResult out;
  out.w = w0;
  out.gamma = gamma0;
  out.w1 = Eigen::VectorXd::Zero(W.num_dofs());
  out.gamma1 = Eigen::VectorXd::Zero(V.num_dofs());
  out.w2 = Eigen::VectorXd::Zero(W.num_dofs());
  out.gamma2 = Eigen::VectorXd::Zero(V.num_dofs());

  auto record_energy = [&]() {
    const double kinetic = 0.5 * out.w1.dot(Ms * out.w1);
    out.energy_gamma.push_back(kinetic + out.gamma.dot(As * out.gamma) / (2.0 * rt));
    out.energy_grad.push_back(kinetic + plate_energy_of_gradient(W, out.w, material) / (2.0 * rt));
  };

  if (cfg.project_initial_acceleration) {
    const Eigen::VectorXd f1 = -(As * gamma0) / rt;
    const ProblemRun init = l2_project(spaces, {}, f1, cfg.initial_penalty, {1.0, 0.0});
    out.initial_iterations = init.report.iterations;
    out.initial_converged = init.report.converged;
    if (!init.report.converged) {
      throw NewmarkDivergence(0, "initial acceleration did not converge in " + std::to_string(init.report.iterations) +
                                     " iterations");
    }
    out.w2 = init.report.w;
    out.gamma2 = init.report.gamma;
  }
  record_energy();

  const PenaltySystem sys =
      build_penalty_system(spaces, plate_form(material, beta * dt * dt / rt), {{FormKind::ScalarMass}}, {}, {},
                           {1.0, dt * dt});
  const IteratedPenaltySolver solver(sys, cfg.penalty.lambda);
  for (int n = 1; n <= cfg.steps; ++n) {
    const double c2 = (0.5 - beta) * dt * dt;
    const Eigen::VectorXd w_hat = out.w + dt * out.w1 + c2 * out.w2;
    const Eigen::VectorXd g_hat = out.gamma + dt * out.gamma1 + c2 * out.gamma2;
    const Eigen::VectorXd F = sys.reduce_rhs({}, -(As * g_hat) / rt);
    const SolveReport rep = solver.solve(F, cfg.penalty.tol, cfg.penalty.max_iter);
    out.iterations.push_back(rep.iterations);
    out.residuals.push_back(rep.final_residual());
    if (!rep.converged) {
      throw NewmarkDivergence(n, "time step " + std::to_string(n) + ": inner solve did not converge in " +
                                     std::to_string(rep.iterations) + " iterations");
    }
    out.w = w_hat + beta * dt * dt * rep.w;
    out.gamma = g_hat + beta * dt * dt * rep.gamma;
    out.w1 += dt * ((1.0 - delta) * out.w2 + delta * rep.w);
    out.gamma1 += dt * ((1.0 - delta) * out.gamma2 + delta * rep.gamma);
    out.w2 = rep.w;
    out.gamma2 = rep.gamma;
    record_energy();
  }
  out.wall_ms = ms_since(t0);
  return out;
}

CiarletRaviartResult ciarlet_raviart_baseline(std::shared_ptr<const SimplicialMesh> mesh, int p,
                                              const std::function<double(const Eigen::VectorXd&)>& g) {
  require_mesh(mesh);
  for (BoundaryTag t : mesh->boundary_tags)
    if (t != BoundaryTag::SimplySupported) throw std::invalid_argument("the two-field scheme needs a simply supported boundary");
  CiarletRaviartResult out;
  out.space = std::make_shared<const LagrangeSpace>(mesh, p, 1);
  const ConstraintSet cs = build_scalar_constraints(*out.space);
  const SparseMatrix M = apply_constraints(assemble_form(FormKind::ScalarMass, *out.space, *out.space), cs, cs);
  const SparseMatrix K = apply_constraints(assemble_form(FormKind::ScalarStiffness, *out.space, *out.space), cs, cs);
  const int n = cs.num_free();
  // unknowns [sigma; w], rows [first equation; second equation]
  std::vector<Eigen::Triplet<double, int>> trips;
  for (int k = 0; k < n; ++k) {
    for (SparseMatrix::InnerIterator it(M, k); it; ++it) trips.emplace_back(it.row(), it.col(), it.value());
    for (SparseMatrix::InnerIterator it(K, k); it; ++it) {
      trips.emplace_back(it.row(), n + it.col(), it.value());
      trips.emplace_back(n + it.row(), it.col(), it.value());
    }
  }
  SparseMatrix A(2 * n, 2 * n);
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * n);
  rhs.tail(n) = apply_constraints(assemble_source(*out.space, g), cs);
  const Eigen::VectorXd x = Factorization(A, false).solve(rhs);
  out.sigma = cs.Z * x.head(n);
  out.w = cs.Z * x.tail(n);
  return out;
}

}  // namespace c1free
