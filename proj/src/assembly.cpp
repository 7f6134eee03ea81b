#include "c1free/assembly.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>

#include "c1free/quadrature.hpp"

namespace c1free {

std::string_view to_string(FormKind kind) {
  switch (kind) {
    case FormKind::ScalarMass: return "scalar_mass";
    case FormKind::ScalarStiffness: return "scalar_stiffness";
    case FormKind::VectorMass: return "vector_mass";
    case FormKind::VectorGradient: return "vector_gradient";
    case FormKind::DivDiv: return "div_div";
    case FormKind::Kirchhoff: return "kirchhoff";
    case FormKind::CurlCurl: return "curl_curl";
    case FormKind::GradCoupling: return "grad_coupling";
    case FormKind::Convection: return "convection";
  }
  return "unknown";
}

bool vector_trial(FormKind kind) {
  switch (kind) {
    case FormKind::ScalarMass:
    case FormKind::ScalarStiffness:
    case FormKind::Convection: return false;
    default: return true;
  }
}

bool vector_test(FormKind kind) { return vector_trial(kind) && kind != FormKind::GradCoupling; }

bool is_symmetric(FormKind kind) { return kind != FormKind::GradCoupling && kind != FormKind::Convection; }

namespace {

// A linear functional of a field at a point: sum of coef * (derivative `deriv` of component `comp`),
// deriv 0 meaning the value and 1 + k the derivative in x_k.
struct Term {
  int comp;
  int deriv;
  double coef;
};
using Feature = std::vector<Term>;

// (trial comp, trial deriv, test comp, test deriv) -> coefficient of the pointwise product.
using Combos = std::map<std::tuple<int, int, int, int>, double>;

void add_pair(Combos& combos, const Feature& trial, const Feature& test, double weight) {
  for (const Term& t : trial)
    for (const Term& s : test) combos[{t.comp, t.deriv, s.comp, s.deriv}] += weight * t.coef * s.coef;
}

Feature divergence(int d) {
  Feature f;
  for (int i = 0; i < d; ++i) f.push_back({i, 1 + i, 1.0});
  return f;
}

std::vector<Feature> curl_features(int d) {
  if (d == 2) return {{{1, 1, 1.0}, {0, 2, -1.0}}};
  return {{{2, 2, 1.0}, {1, 3, -1.0}}, {{0, 3, 1.0}, {2, 1, -1.0}}, {{1, 1, 1.0}, {0, 2, -1.0}}};
}

void add_kind(Combos& combos, FormKind kind, const FormParams& params, double scale, int d) {
  switch (kind) {
    case FormKind::ScalarMass:
      add_pair(combos, {{0, 0, 1.0}}, {{0, 0, 1.0}}, scale);
      break;
    case FormKind::ScalarStiffness:
      for (int k = 0; k < d; ++k) add_pair(combos, {{0, 1 + k, 1.0}}, {{0, 1 + k, 1.0}}, scale);
      break;
    case FormKind::VectorMass:
      for (int i = 0; i < d; ++i) add_pair(combos, {{i, 0, 1.0}}, {{i, 0, 1.0}}, scale);
      break;
    case FormKind::VectorGradient:
      for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) add_pair(combos, {{i, 1 + k, 1.0}}, {{i, 1 + k, 1.0}}, scale);
      break;
    case FormKind::DivDiv:
      add_pair(combos, divergence(d), divergence(d), scale);
      break;
    case FormKind::Kirchhoff: {
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
          const Feature eps = i == j ? Feature{{i, 1 + i, 1.0}} : Feature{{i, 1 + j, 0.5}, {j, 1 + i, 0.5}};
          add_pair(combos, eps, eps, scale * params.D * (1.0 - params.nu) * (i == j ? 1.0 : 2.0));
        }
      add_pair(combos, divergence(d), divergence(d), scale * params.D * params.nu);
      break;
    }
    case FormKind::CurlCurl:
      for (const Feature& c : curl_features(d)) add_pair(combos, c, c, scale);
      break;
    case FormKind::GradCoupling:
      for (int k = 0; k < d; ++k) add_pair(combos, {{k, 0, 1.0}}, {{0, 1 + k, 1.0}}, scale);
      break;
    case FormKind::Convection: {
      if (params.b.size() != d) throw std::invalid_argument("convection form needs a " + std::to_string(d) + "-vector b");
      Feature bgrad;
      for (int k = 0; k < d; ++k)
        if (params.b[k] != 0.0) bgrad.push_back({0, 1 + k, params.b[k]});
      add_pair(combos, bgrad, {{0, 0, 1.0}}, scale);
      break;
    }
  }
}

void check_spaces(const FormSum& form, const LagrangeSpace* trial, const LagrangeSpace& test) {
  if (form.empty()) return;
  const bool vt = vector_trial(form.front().kind), vs = vector_test(form.front().kind);
  for (const FormTerm& term : form) {
    if (vector_trial(term.kind) != vt || vector_test(term.kind) != vs) {
      throw std::invalid_argument("form terms mix incompatible argument types");
    }
  }
  const int d = test.dim();
  const std::string name(to_string(form.front().kind));
  auto expect = [&](const LagrangeSpace& s, bool vec, const char* which) {
    const int want = vec ? d : 1;
    if (s.value_dim() != want) {
      throw std::invalid_argument(std::string("incompatible ") + which + " space for form " + name + ": value_dim " +
                                  std::to_string(s.value_dim()) + ", expected " + std::to_string(want));
    }
  };
  expect(test, vs, "test");
  if (trial) {
    expect(*trial, vt, "trial");
    if (trial->mesh_ptr() != test.mesh_ptr()) throw std::invalid_argument("trial and test spaces live on different meshes");
  }
}

Combos combos_of(const FormSum& form, int d) {
  Combos combos;
  for (const FormTerm& term : form) add_kind(combos, term.kind, term.params, term.scale, d);
  for (auto it = combos.begin(); it != combos.end();) it = it->second == 0.0 ? combos.erase(it) : std::next(it);
  return combos;
}

int max_deriv(const Combos& combos, bool trial) {
  int m = 0;
  for (const auto& [key, c] : combos) m = std::max(m, trial ? std::get<1>(key) : std::get<3>(key));
  return m > 0 ? 1 : 0;
}

QuadratureRule rule_for(int dim, int exactness) {
  const int cap = dim == 2 ? kMaxExactness2D : kMaxExactness3D;
  return simplex_rule(dim, std::min(exactness, cap));
}

// Rows: quadrature points, columns: local scalar basis functions; index 0 values, 1 + k d/dx_k.
std::vector<Eigen::MatrixXd> derivative_tables(const BasisTableau& phys, int order) {
  std::vector<Eigen::MatrixXd> out{phys.values};
  if (order >= 1)
    for (const auto& g : phys.gradients) out.push_back(g);
  return out;
}

}  // namespace

SparseMatrix assemble_form(const FormSum& form, const LagrangeSpace& trial, const LagrangeSpace& test, int exactness) {
  check_spaces(form, &trial, test);
  const SimplicialMesh& mesh = test.mesh();
  const int d = mesh.dim;
  SparseMatrix out(test.num_dofs(), trial.num_dofs());
  const Combos combos = combos_of(form, d);
  if (combos.empty()) return out;
  if (exactness < 0) exactness = 2 * std::max(trial.degree(), test.degree());
  const QuadratureRule rule = rule_for(d, exactness);
  const int ot = max_deriv(combos, true), os = max_deriv(combos, false);
  const BasisTableau ref_t = trial.basis().tabulate(rule.points, ot);
  const BasisTableau ref_s = test.basis().tabulate(rule.points, os);
  const int nt = trial.nodes_per_cell(), ns = test.nodes_per_cell();
  const int vdt = trial.value_dim(), vds = test.value_dim();

  std::vector<Eigen::Triplet<double, int>> trips;
  trips.reserve(static_cast<std::size_t>(mesh.num_cells()) * static_cast<std::size_t>(nt * vdt) *
                static_cast<std::size_t>(ns * vds) / static_cast<std::size_t>(std::max(1, std::min(vdt, vds))));
  std::map<std::pair<int, int>, Eigen::MatrixXd> products;
  Eigen::MatrixXd local(ns * vds, nt * vdt);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geom = cell_geometry(mesh, c);
    const auto Dt = derivative_tables(to_physical(ref_t, geom), ot);
    const auto Ds = derivative_tables(to_physical(ref_s, geom), os);
    const Eigen::VectorXd w = rule.weights * std::abs(geom.detJ);
    products.clear();
    local.setZero();
    for (const auto& [key, coef] : combos) {
      const auto [ct, dt, cs, ds] = key;
      auto it = products.find({ds, dt});
      if (it == products.end()) {
        it = products.emplace(std::make_pair(ds, dt), Ds[static_cast<std::size_t>(ds)].transpose() * w.asDiagonal() *
                                                          Dt[static_cast<std::size_t>(dt)]).first;
      }
      const Eigen::MatrixXd& S = it->second;
      for (int b = 0; b < nt; ++b)
        for (int a = 0; a < ns; ++a) local(a * vds + cs, b * vdt + ct) += coef * S(a, b);
    }
    for (int b = 0; b < nt; ++b)
      for (int ct = 0; ct < vdt; ++ct) {
        const int col = trial.dof(trial.cell_nodes()(b, c), ct);
        for (int a = 0; a < ns; ++a)
          for (int cs = 0; cs < vds; ++cs) {
            const double v = local(a * vds + cs, b * vdt + ct);
            if (v != 0.0) trips.emplace_back(test.dof(test.cell_nodes()(a, c), cs), col, v);
          }
      }
  }
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

SparseMatrix assemble_form(FormKind kind, const LagrangeSpace& trial, const LagrangeSpace& test,
                           const FormParams& params, int exactness) {
  return assemble_form(FormSum{{kind, 1.0, params}}, trial, test, exactness);
}

FieldJet scalar_jet(const ScalarFunction& w) {
  return {1, [w](const Eigen::VectorXd& x) {
            Eigen::MatrixXd out = Eigen::MatrixXd::Zero(1, x.size() + 1);
            out(0, 0) = w.value(x);
            if (w.gradient) out.rightCols(x.size()) = w.gradient(x).transpose();
            return out;
          }};
}

FieldJet gradient_jet(const ScalarFunction& w) {
  if (!w.gradient) throw std::invalid_argument("gradient_jet: gradient callback missing");
  return {-1, [w](const Eigen::VectorXd& x) {
            const auto d = x.size();
            Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d + 1);
            out.col(0) = w.gradient(x);
            if (w.hessian) out.rightCols(d) = w.hessian(x);
            return out;
          }};
}

Eigen::VectorXd assemble_form_against_field(const FormSum& form, const FieldJet& field, const LagrangeSpace& test,
                                            int exactness) {
  check_spaces(form, nullptr, test);
  const SimplicialMesh& mesh = test.mesh();
  const int d = mesh.dim;
  const int field_dim = field.value_dim < 0 ? d : field.value_dim;
  if (!form.empty() && field_dim != (vector_trial(form.front().kind) ? d : 1)) {
    throw std::invalid_argument("field value dimension does not match the form's trial argument");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(test.num_dofs());
  const Combos combos = combos_of(form, d);
  if (combos.empty()) return out;
  if (exactness < 0) exactness = 2 * test.degree() + 4;
  const QuadratureRule rule = rule_for(d, exactness);
  const int os = max_deriv(combos, false);
  const BasisTableau ref_s = test.basis().tabulate(rule.points, os);
  const int ns = test.nodes_per_cell(), vds = test.value_dim();
  Eigen::VectorXd local(ns * vds);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geom = cell_geometry(mesh, c);
    const auto Ds = derivative_tables(to_physical(ref_s, geom), os);
    const Eigen::MatrixXd x = geom.to_physical(rule.points);
    std::vector<Eigen::MatrixXd> jets;
    jets.reserve(static_cast<std::size_t>(rule.size()));
    for (int q = 0; q < rule.size(); ++q) jets.push_back(field.eval(x.col(q)));
    local.setZero();
    for (const auto& [key, coef] : combos) {
      const auto [ct, dt, cs, ds] = key;
      Eigen::VectorXd g(rule.size());
      for (int q = 0; q < rule.size(); ++q) g[q] = rule.weights[q] * std::abs(geom.detJ) * jets[static_cast<std::size_t>(q)](ct, dt);
      const Eigen::VectorXd contrib = Ds[static_cast<std::size_t>(ds)].transpose() * g;
      for (int a = 0; a < ns; ++a) local[a * vds + cs] += coef * contrib[a];
    }
    for (int a = 0; a < ns; ++a)
      for (int cs = 0; cs < vds; ++cs) out[test.dof(test.cell_nodes()(a, c), cs)] += local[a * vds + cs];
  }
  return out;
}

Eigen::VectorXd assemble_form_against_field(FormKind kind, const FieldJet& field, const LagrangeSpace& test,
                                            const FormParams& params, int exactness) {
  return assemble_form_against_field(FormSum{{kind, 1.0, params}}, field, test, exactness);
}

Eigen::VectorXd assemble_form_against_interpolant(const FormSum& form, const LagrangeSpace& trial,
                                                  const Eigen::VectorXd& interpolant, const LagrangeSpace& test) {
  if (interpolant.size() != trial.num_dofs()) throw std::invalid_argument("interpolant length mismatch");
  return assemble_form(form, trial, test) * interpolant;
}

Eigen::VectorXd assemble_source(const LagrangeSpace& space, const std::function<double(const Eigen::VectorXd&)>& f,
                                int exactness) {
  return assemble_form_against_field(FormKind::ScalarMass, scalar_jet({f, {}, {}}), space, {}, exactness);
}

Eigen::VectorXd assemble_point_load(const LagrangeSpace& space, int vertex, double c) {
  if (space.value_dim() != 1) throw std::invalid_argument("point load needs a scalar space");
  if (vertex < 0 || vertex >= space.mesh().num_vertices() || space.vertex_node(vertex) < 0) {
    throw std::invalid_argument("point load location is not a mesh vertex");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.num_dofs());
  out[space.vertex_node(vertex)] = c;
  return out;
}

Eigen::VectorXd assemble_point_load(const LagrangeSpace& space, const Eigen::VectorXd& z, double c) {
  const int v = z.size() == space.dim() ? find_vertex(space.mesh(), z) : -1;
  if (v < 0) throw std::invalid_argument("point load location is not a mesh vertex");
  return assemble_point_load(space, v, c);
}

SparseMatrix apply_constraints(const SparseMatrix& A, const ConstraintSet& trial, const ConstraintSet& test) {
  if (A.rows() != test.Z.rows() || A.cols() != trial.Z.rows()) {
    throw std::invalid_argument("apply_constraints: shape mismatch (" + std::to_string(A.rows()) + "x" +
                                std::to_string(A.cols()) + " against " + std::to_string(test.Z.rows()) + "x" +
                                std::to_string(trial.Z.rows()) + ")");
  }
  SparseMatrix out = SparseMatrix(test.Z.transpose()) * A * trial.Z;
  out.prune(0.0);
  out.makeCompressed();
  return out;
}

Eigen::VectorXd apply_constraints(const Eigen::VectorXd& f, const ConstraintSet& test) {
  if (f.size() != test.Z.rows()) throw std::invalid_argument("apply_constraints: vector length mismatch");
  return test.Z.transpose() * f;
}

}  // namespace c1free
