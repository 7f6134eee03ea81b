#pragma once

#include <vector>

#include <Eigen/Dense>

#include "c1free/assembly.hpp"
#include "c1free/fespace.hpp"
#include "c1free/ipsolver.hpp"
#include "c1free/linalg.hpp"

namespace c1free {

/// Brute-force conforming Galerkin solve in W = {v in W~ : grad v in G}, independent of the
/// iterated penalty method.
struct OracleResult {
  Eigen::VectorXd w;      ///< full scalar coefficients
  Eigen::VectorXd gamma;  ///< full vector coefficients of the L2 projection of grad w (equal to grad w)
  Eigen::MatrixXd basis;  ///< reduced scalar coefficients of an orthonormal basis of W
  NullspaceResult nullspace;
  bool solved = false;

  int dimension() const { return static_cast<int>(basis.cols()); }
};

/// Maximum reduced scalar DOF count accepted by the dense oracle.
inline constexpr int kOracleMaxDofs = 4000;

/// The nullspace of S = K - G M^{-1} G^T (the L2 distance of grad v from G) spans W; the Galerkin
/// matrix of B = c(v, u) + a(grad v, grad u) is formed on it with grad v = M^{-1} G^T v.
/// If dim W = 0 and F is nonzero, solved is false.
OracleResult oracle_conforming_solve(const PenaltySystem& system, double rtol = 1e-9);

/// max over interior facets and facet quadrature points of |grad v+ - grad v-|, divided by
/// max |grad v| over the same samples. 0 for a constant field, i.e. when max |grad v| does not
/// exceed 1e-10 max |coefficient|.
double c1_jump(const LagrangeSpace& space, const Eigen::VectorXd& coefficients);

struct ErrorNorm {
  double absolute = 0.0;
  double relative = 0.0;
};

/// Broken H^order error sqrt(sum_K int |D^k(u - w)|^2, k <= order) against an exact field, with
/// quadrature exactness 2p + 2. The relative value divides by the same norm of w.
ErrorNorm broken_sobolev_error(const LagrangeSpace& space, const Eigen::VectorXd& coefficients,
                               const ScalarFunction& exact, int order);
ErrorNorm broken_h2_error(const LagrangeSpace& space, const Eigen::VectorXd& coefficients, const ScalarFunction& exact);

/// Broken H^order norm of a discrete scalar field.
double broken_sobolev_norm(const LagrangeSpace& space, const Eigen::VectorXd& coefficients, int order);

/// ||a - b||_{H1} / ||b||_{H1}.
double relative_h1_difference(const LagrangeSpace& space, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// ||grad w - gamma||_{L2}.
double gradient_mismatch(const LagrangeSpace& scalar, const Eigen::VectorXd& w, const LagrangeSpace& vector,
                         const Eigen::VectorXd& gamma);

/// Least-squares slope of log(error) against log(h). Throws for fewer than two or non-positive values.
double convergence_slope(const std::vector<double>& h, const std::vector<double>& error);

struct KernelDimension {
  int dimension = 0;
  int rank = 0;
  double gap = 0.0;
  bool borderline = false;  ///< gap below 1e2 between kept and discarded singular values
};

/// dim W for the mesh tags and degree p, via the nullspace of the projection residual operator.
KernelDimension kernel_dimension(std::shared_ptr<const SimplicialMesh> mesh, int p, double rtol = 1e-9);

/// Independent count: gradient jumps sampled at a unisolvent point set on each interior facet
/// (p Gauss points per edge in 2D, a degree p - 1 lattice per face in 3D), plus normal derivatives
/// on clamped facets, restricted to the constrained scalar space.
KernelDimension kernel_dimension_by_jumps(std::shared_ptr<const SimplicialMesh> mesh, int p, double rtol = 1e-9);

/// max_n |E_n - E_0| / E_0; infinite when E_0 = 0 and a later energy is not.
double energy_deviation(const std::vector<double>& energies);

}  // namespace c1free
