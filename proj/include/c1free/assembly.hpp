#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "c1free/fespace.hpp"

namespace c1free {

enum class FormKind {
  ScalarMass,       ///< (u, v)
  ScalarStiffness,  ///< (grad u, grad v)
  VectorMass,       ///< (theta, psi)
  VectorGradient,   ///< (grad theta, grad psi)
  DivDiv,           ///< (div theta, div psi)
  Kirchhoff,        ///< D[(1-nu)(eps(theta), eps(psi)) + nu (div theta, div psi)]
  CurlCurl,         ///< (curl theta, curl psi); scalar curl in 2D
  GradCoupling,     ///< (psi, grad v): vector trial, scalar test
  Convection,       ///< (b . grad u, v) with constant b
};

std::string_view to_string(FormKind kind);

struct FormParams {
  double D = 1.0;
  double nu = 0.3;
  Eigen::VectorXd b;  ///< convection vector, dim entries
};

/// True if the kind expects a vector trial (resp. test) space.
bool vector_trial(FormKind kind);
bool vector_test(FormKind kind);
bool is_symmetric(FormKind kind);

/// scale * kind(params); a FormSum is a linear combination, empty meaning the zero form.
struct FormTerm {
  FormKind kind;
  double scale = 1.0;
  FormParams params{};
};
using FormSum = std::vector<FormTerm>;

/// Matrix with entry (i, j) = form(trial_j, test_i), shape test.num_dofs() x trial.num_dofs().
/// exactness < 0 selects 2 * max(trial degree, test degree).
SparseMatrix assemble_form(FormKind kind, const LagrangeSpace& trial, const LagrangeSpace& test,
                           const FormParams& params = {}, int exactness = -1);
SparseMatrix assemble_form(const FormSum& form, const LagrangeSpace& trial, const LagrangeSpace& test,
                           int exactness = -1);

/// Callable returning, at a physical point, a value_dim x (dim + 1) matrix: column 0 holds the
/// value and column 1 + k the derivative in x_k.
struct FieldJet {
  int value_dim = 1;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> eval;
};

/// A scalar function with optional first and second derivatives.
struct ScalarFunction {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
};

/// Jet of w (value and gradient) and of grad w (gradient and Hessian).
FieldJet scalar_jet(const ScalarFunction& w);
FieldJet gradient_jet(const ScalarFunction& w);

/// Vector b_i = form(field, test_i), with the trial argument replaced by an exactly evaluated field.
Eigen::VectorXd assemble_form_against_field(FormKind kind, const FieldJet& field, const LagrangeSpace& test,
                                            const FormParams& params = {}, int exactness = -1);
Eigen::VectorXd assemble_form_against_field(const FormSum& form, const FieldJet& field, const LagrangeSpace& test,
                                            int exactness = -1);

/// Vector b_i = form(I field, test_i) with I the nodal interpolant into `trial`.
Eigen::VectorXd assemble_form_against_interpolant(const FormSum& form, const LagrangeSpace& trial,
                                                  const Eigen::VectorXd& interpolant, const LagrangeSpace& test);

/// L2 source: b_i = (f, v_i) for a scalar space.
Eigen::VectorXd assemble_source(const LagrangeSpace& space, const std::function<double(const Eigen::VectorXd&)>& f,
                                int exactness = -1);

/// c * v_i(z) for z a mesh vertex: c times the canonical basis vector of the vertex DOF.
/// Throws std::invalid_argument if z is not a mesh vertex.
Eigen::VectorXd assemble_point_load(const LagrangeSpace& space, const Eigen::VectorXd& z, double c);
Eigen::VectorXd assemble_point_load(const LagrangeSpace& space, int vertex, double c);

/// Z_s^T A Z_t and Z_s^T f.
SparseMatrix apply_constraints(const SparseMatrix& A, const ConstraintSet& trial, const ConstraintSet& test);
Eigen::VectorXd apply_constraints(const Eigen::VectorXd& f, const ConstraintSet& test);

}  // namespace c1free
