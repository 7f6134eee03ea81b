#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "c1free/mesh.hpp"
#include "c1free/problems.hpp"
#include "c1free/verify.hpp"

namespace py = pybind11;
using namespace c1free;

namespace {

using MeshPtr = std::shared_ptr<const SimplicialMesh>;

py::dict summarize(const ProblemRun& run) {
  py::dict d;
  d["iterations"] = run.report.iterations;
  d["converged"] = run.report.converged;
  d["residuals"] = run.report.residuals;
  d["w"] = run.report.w;
  d["gamma"] = run.report.gamma;
  d["error_rel_h2"] = run.error_rel_h2;
  d["c1_jump"] = c1_jump(run.scalar_space(), run.report.w);
  d["gradient_mismatch"] = gradient_mismatch(run.scalar_space(), run.report.w, run.vector_space(), run.report.gamma);
  d["num_dofs"] = run.system->size();
  return d;
}

BoundaryTag tag_of(const std::string& s) { return parse_boundary_tag(s); }

}  // namespace

PYBIND11_MODULE(_c1free, m) {
  m.doc() = "C1 finite elements on simplicial meshes through the iterated penalty method";

  py::class_<SimplicialMesh, std::shared_ptr<SimplicialMesh>>(m, "Mesh")
      .def_readonly("dim", &SimplicialMesh::dim)
      .def_property_readonly("vertices", [](const SimplicialMesh& s) { return s.vertices; })
      .def_property_readonly("cells", [](const SimplicialMesh& s) { return s.cells; })
      .def_property_readonly("num_vertices", &SimplicialMesh::num_vertices)
      .def_property_readonly("num_cells", &SimplicialMesh::num_cells)
      .def("total_volume", &SimplicialMesh::total_volume)
      .def("validate", [](const SimplicialMesh& s) { return validate_mesh(s).summary(); });

  auto shared = [](SimplicialMesh mesh) { return std::make_shared<SimplicialMesh>(std::move(mesh)); };
  m.def("unit_square", [=](int n, const std::string& tag) { return shared(generate_unit_square_mesh(n, tag_of(tag))); },
        py::arg("n"), py::arg("tag") = "simply_supported");
  m.def("freudenthal", [=](int n, const std::string& tag) { return shared(generate_freudenthal_mesh(n, tag_of(tag))); },
        py::arg("m"), py::arg("tag") = "free");
  m.def("perturb", [=](const SimplicialMesh& s, double a, std::uint64_t seed) { return shared(perturb_interior_vertices(s, a, seed)); },
        py::arg("mesh"), py::arg("amplitude"), py::arg("seed") = 42);
  m.def("alfeld_split", [=](const SimplicialMesh& s) { return shared(alfeld_split(s)); });
  m.def("worsey_farin_split", [=](const SimplicialMesh& s) { return shared(worsey_farin_split(s)); });
  m.def("read_mesh", [=](const std::string& path) { return shared(read_mesh(std::filesystem::path(path))); });
  m.def("write_mesh", [](const SimplicialMesh& s, const std::string& path) { write_mesh(s, std::filesystem::path(path)); });

  m.def(
      "plate_static",
      [](std::shared_ptr<SimplicialMesh> mesh, int p, double load, std::vector<double> point, double lam, double tol,
         int max_iter) {
        const int v = nearest_vertex(*mesh, Eigen::Map<const Eigen::VectorXd>(point.data(), static_cast<Eigen::Index>(point.size())));
        return summarize(solve_plate_static(mesh, p, PlateMaterial{}, load, v, {lam, tol, max_iter}));
      },
      py::arg("mesh"), py::arg("p"), py::arg("load") = 1e3, py::arg("point") = std::vector<double>{0.66, 0.33},
      py::arg("lam") = 1e3, py::arg("tol") = 1e-8, py::arg("max_iter") = 100);
  m.def(
      "projection_3d",
      [](int mlevel, int p, double lam, double tol, int max_iter) {
        return summarize(solve_projection_3d(mlevel, p, {lam, tol, max_iter}));
      },
      py::arg("m"), py::arg("p"), py::arg("lam") = 1e4, py::arg("tol") = 1e-8, py::arg("max_iter") = 100);
  m.def(
      "general_fourth_order",
      [](std::shared_ptr<SimplicialMesh> mesh, int p, Eigen::VectorXd b, std::function<double(const Eigen::VectorXd&)> f,
         double lam, double tol, int max_iter) {
        return summarize(solve_general_fourth_order(mesh, p, b, f, {lam, tol, max_iter}));
      },
      py::arg("mesh"), py::arg("p"), py::arg("b"), py::arg("f"), py::arg("lam") = 1e3, py::arg("tol") = 1e-8,
      py::arg("max_iter") = 100);
  m.def(
      "kernel_dimension",
      [](std::shared_ptr<SimplicialMesh> mesh, int p) {
        const KernelDimension a = kernel_dimension(mesh, p);
        const KernelDimension b = kernel_dimension_by_jumps(mesh, p);
        return py::make_tuple(a.dimension, b.dimension);
      },
      py::arg("mesh"), py::arg("p"));
  m.def("convergence_slope", &convergence_slope, py::arg("h"), py::arg("error"));
  m.def("energy_deviation", &energy_deviation, py::arg("energies"));
}
