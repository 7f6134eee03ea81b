#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "c1free/assembly.hpp"
#include "c1free/ipsolver.hpp"
#include "c1free/mesh.hpp"

namespace c1free {

/// Isotropic plate. Defaults are the steel plate (SI units).
struct PlateMaterial {
  double E = 2.1e11;
  double nu = 0.3;
  double tau = 1e-2;
  double rho = 7820.0;

  /// Bending stiffness E tau^3 / (12 (1 - nu^2)).
  double D() const { return E * tau * tau * tau / (12.0 * (1.0 - nu * nu)); }
  /// Throws std::invalid_argument unless 0 < nu < 1/2 and E, tau, rho > 0.
  void validate() const;
};

/// a_s(theta, psi) scaled by `scale`: D[(1 - nu)(eps, eps) + nu (div, div)].
FormSum plate_form(const PlateMaterial& material, double scale = 1.0);

/// A finished solve together with the system it ran on.
struct ProblemRun {
  std::shared_ptr<const PenaltySystem> system;
  SolveReport report;
  double error_rel_h2 = std::numeric_limits<double>::quiet_NaN();  ///< only for problems with a known solution
  double wall_ms = 0.0;                                            ///< assembly plus solve

  const LagrangeSpace& scalar_space() const { return *system->spaces.scalar; }
  const LagrangeSpace& vector_space() const { return *system->spaces.vector; }
};

/// Vertex nearest to z.
int nearest_vertex(const SimplicialMesh& mesh, const Eigen::VectorXd& z);

/// Kirchhoff plate under a point load c at a vertex: a = a_s / D, c absent, F2 = (c / D) v(z),
/// weights (1, 1). Throws std::invalid_argument for 3D meshes, p < 2 or an invalid vertex.
ProblemRun solve_plate_static(std::shared_ptr<const SimplicialMesh> mesh, int p, const PlateMaterial& material,
                              double load, int vertex, const PenaltyOptions& options);

/// sin(pi x) sin(pi y) sin(pi z) with derivatives (any dimension: product over coordinates).
ScalarFunction sine_product(int dim);

/// (D^2 u, D^2 v) + (grad u, grad v) + (u, v) on the free-boundary unit cube, split as
/// a = vector gradient, c = stiffness + mass, with data from the exact sine product. Sets error_rel_h2.
ProblemRun solve_projection_3d(std::shared_ptr<const SimplicialMesh> mesh, int p, const PenaltyOptions& options);
/// Same on the Freudenthal mesh with m^3 subcubes.
ProblemRun solve_projection_3d(int m, int p, const PenaltyOptions& options);

/// Legal ways of distributing (lap u, lap v) + (grad u, grad v) + (b . grad u, v) + (u, v) over a and c.
enum class Splitting {
  Standard,  ///< a = div-div, c = stiffness + convection + mass
  MassInA,   ///< a = div-div + vector mass, c = convection + mass
};

/// General fourth-order problem with constant convection b and source f. Nonsymmetric for b != 0.
ProblemRun solve_general_fourth_order(std::shared_ptr<const SimplicialMesh> mesh, int p, const Eigen::VectorXd& b,
                                      const std::function<double(const Eigen::VectorXd&)>& f,
                                      const PenaltyOptions& options, Splitting splitting = Splitting::Standard,
                                      InnerProductWeights weights = {});

/// (w, v) = F2(v) + F1(grad v) over W: a absent, c = mass. f2 / f1 are full load vectors (empty = 0).
ProblemRun l2_project(const MixedSpaces& spaces, const Eigen::VectorXd& f2, const Eigen::VectorXd& f1,
                      const PenaltyOptions& options, InnerProductWeights weights = {1.0, 0.0});
/// (w, v) = (g, v).
ProblemRun l2_project(std::shared_ptr<const SimplicialMesh> mesh, int p,
                      const std::function<double(const Eigen::VectorXd&)>& g, const PenaltyOptions& options,
                      InnerProductWeights weights = {1.0, 0.0});

struct NewmarkConfig {
  double dt = 2e-4;
  double beta = 0.25;
  double delta = 0.5;
  int steps = 50;
  PenaltyOptions penalty{1e4, 1e-8, 100};
  /// Initial acceleration by L2 projection of the static forces (weights (1, 0)); zero otherwise.
  bool project_initial_acceleration = false;
  PenaltyOptions initial_penalty{2e4, 1e-8, 100};

  void validate() const;
};

struct NewmarkResult {
  std::vector<double> energy_gamma;  ///< 1/2 (w', w') + a_s(gamma, gamma) / (2 rho tau), entries 0..steps
  std::vector<double> energy_grad;   ///< same with grad w in place of gamma
  std::vector<int> iterations;       ///< inner iterations of steps 1..steps
  std::vector<double> residuals;     ///< final inner residual per step
  int initial_iterations = 0;        ///< 0 when the initial acceleration is not projected
  bool initial_converged = true;
  Eigen::VectorXd w, w1, w2;         ///< displacement, velocity, acceleration after the last step
  Eigen::VectorXd gamma, gamma1, gamma2;
  double wall_ms = 0.0;
};

/// Thrown when an inner solve of a time step does not converge.
class NewmarkDivergence : public std::runtime_error {
 public:
  NewmarkDivergence(int step, const std::string& what) : std::runtime_error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// Newmark time stepping of the dynamic plate from the displacement (w0, gamma0) at rest.
/// The spaces must be those w0 and gamma0 live in. Throws NewmarkDivergence with the step index.
NewmarkResult newmark_run(const MixedSpaces& spaces, const PlateMaterial& material, const NewmarkConfig& config,
                          const Eigen::VectorXd& w0, const Eigen::VectorXd& gamma0);

/// D[(1 - nu)|hess w|^2 + nu (lap w)^2] integrated cellwise: a_s(grad w, grad w) for a C1 field.
double plate_energy_of_gradient(const LagrangeSpace& scalar, const Eigen::VectorXd& w, const PlateMaterial& material);

/// Two-field C0 scheme for the simply supported biharmonic problem:
///   (sigma, v) + (grad w, grad v) = 0,  (grad sigma, grad u) = (g, u),
/// with w, sigma vanishing on the boundary. The pair satisfies lap^2 w = -g.
struct CiarletRaviartResult {
  std::shared_ptr<const LagrangeSpace> space;
  Eigen::VectorXd w;
  Eigen::VectorXd sigma;
};

CiarletRaviartResult ciarlet_raviart_baseline(std::shared_ptr<const SimplicialMesh> mesh, int p,
                                              const std::function<double(const Eigen::VectorXd&)>& g);

}  // namespace c1free
