// Command-line driver for the C1 iterated penalty experiments.
//
// Every run subcommand writes <out>/report.csv and <out>/config.txt. Exit status: 0 on success,
// 2 if a solve did not converge (artifacts are still written), 1 on input errors.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "c1free/mesh.hpp"
#include "c1free/problems.hpp"
#include "c1free/verify.hpp"
#include "c1free/vtk.hpp"

namespace fs = std::filesystem;
using namespace c1free;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;

struct MeshOptions {
  std::string file;
  int square = 0;
  int freudenthal = 0;
  std::string tag = "simply_supported";
  double perturb = 0.0;
  std::uint64_t seed = 42;
  bool alfeld = false;
  bool worsey_farin = false;
};

struct SolverOptions {
  std::vector<int> p;
  double lambda = 1e3;
  double tol = 1e-8;
  int max_iter = 100;
  double mass_weight = 1.0;
  double curl_weight = 1.0;

  PenaltyOptions penalty() const { return {lambda, tol, max_iter}; }
  InnerProductWeights weights() const { return {mass_weight, curl_weight}; }
};

struct OutputOptions {
  std::string dir = ".";
  bool vtk = false;
  bool no_timing = false;
};

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string to_text(const std::string& v) { return v; }
std::string to_text(bool v) { return v ? "true" : "false"; }
std::string to_text(double v) { return fmt(v); }
template <class T>
  requires std::is_integral_v<T>
std::string to_text(T v) {
  return std::to_string(v);
}
template <class T>
std::string to_text(const std::vector<T>& v) {
  std::string s;
  for (const T& x : v) s += (s.empty() ? "" : " ") + to_text(x);
  return s;
}

// Resolved value of every option, so config.txt reflects per-subcommand defaults too.
std::map<const CLI::Option*, std::function<std::string()>>& registry() {
  static std::map<const CLI::Option*, std::function<std::string()>> r;
  return r;
}

template <class T>
CLI::Option* option(CLI::App* sub, const std::string& name, T& var, const std::string& desc) {
  CLI::Option* o = sub->add_option(name, var, desc);
  registry()[o] = [&var] { return to_text(var); };
  return o;
}

CLI::Option* flag(CLI::App* sub, const std::string& name, bool& var, const std::string& desc) {
  CLI::Option* o = sub->add_flag(name, var, desc);
  registry()[o] = [&var] { return to_text(var); };
  return o;
}

void write_config(const CLI::App& sub, const fs::path& path) {
  std::ofstream f(path);
  f << "subcommand=" << sub.get_name() << '\n';
  for (const CLI::Option* o : sub.get_options()) {
    const auto it = registry().find(o);
    if (it != registry().end()) f << o->get_single_name() << '=' << it->second() << '\n';
  }
}

struct Row {
  std::string problem;
  int p = 0;
  double h_or_m = 0.0;
  double lambda = 0.0;
  int iterations = 0;
  bool converged = false;
  double residual_final = 0.0;
  double error_rel_h2 = std::numeric_limits<double>::quiet_NaN();
  double wall_ms = 0.0;
};

class Report {
 public:
  explicit Report(const OutputOptions& out) : out_(out) {}

  void add(const Row& r) {
    rows_.push_back(r);
    all_converged_ = all_converged_ && r.converged;
  }
  bool all_converged() const { return all_converged_; }

  void write() const {
    std::ofstream f(fs::path(out_.dir) / "report.csv");
    if (!f) throw std::runtime_error("cannot write report.csv in " + out_.dir);
    f << "problem,p,h_or_m,lambda,iterations,converged,residual_final,error_rel_h2,wall_ms\n";
    for (const Row& r : rows_) {
      f << r.problem << ',' << r.p << ',' << fmt(r.h_or_m) << ',' << fmt(r.lambda) << ',' << r.iterations << ','
        << (r.converged ? "true" : "false") << ',' << fmt(r.residual_final) << ',' << fmt(r.error_rel_h2) << ','
        << (out_.no_timing ? std::string() : fmt(r.wall_ms)) << '\n';
    }
  }

 private:
  OutputOptions out_;
  std::vector<Row> rows_;
  bool all_converged_ = true;
};

double mesh_size(const SimplicialMesh& mesh) {
  double h = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c)
    for (int i = 0; i <= mesh.dim; ++i)
      for (int j = i + 1; j <= mesh.dim; ++j)
        h = std::max(h, (mesh.vertices.col(mesh.cells(i, c)) - mesh.vertices.col(mesh.cells(j, c))).norm());
  return h;
}

std::shared_ptr<const SimplicialMesh> make_mesh(const MeshOptions& o) {
  SimplicialMesh mesh;
  const BoundaryTag tag = parse_boundary_tag(o.tag);
  if (!o.file.empty()) {
    if (!fs::exists(o.file)) throw std::invalid_argument("mesh file not found: " + o.file);
    mesh = read_mesh(fs::path(o.file));
  } else if (o.freudenthal > 0) {
    mesh = generate_freudenthal_mesh(o.freudenthal, tag);
  } else if (o.square > 0) {
    mesh = generate_unit_square_mesh(o.square, tag);
  } else {
    throw std::invalid_argument("no mesh given: use --mesh, --square or --freudenthal");
  }
  if (o.perturb > 0.0) mesh = perturb_interior_vertices(mesh, o.perturb, o.seed);
  if (o.alfeld) mesh = alfeld_split(mesh);
  if (o.worsey_farin) mesh = worsey_farin_split(mesh);
  return std::make_shared<const SimplicialMesh>(std::move(mesh));
}

void add_mesh_options(CLI::App* sub, MeshOptions& o) {
  auto* file = option(sub, "--mesh", o.file, "Mesh file")->capture_default_str();
  option(sub, "--square", o.square, "Unit square with n x n subsquares")->capture_default_str()->excludes(file);
  option(sub, "--freudenthal", o.freudenthal, "Unit cube with m^3 Freudenthal subcubes")->capture_default_str()->excludes(file);
  option(sub, "--tag", o.tag, "Boundary tag for generated meshes")
      ->check(CLI::IsMember({"clamped", "simply_supported", "free"}))
      ->capture_default_str();
  option(sub, "--perturb", o.perturb, "Random interior vertex offset, fraction of the shortest incident edge")
      ->check(CLI::Range(0.0, 0.49))
      ->capture_default_str();
  option(sub, "--seed", o.seed, "Seed of the vertex perturbation")->capture_default_str();
  flag(sub, "--alfeld", o.alfeld, "Barycentric split of every cell");
  flag(sub, "--worsey-farin", o.worsey_farin, "Worsey-Farin split of every tetrahedron");
}

void add_solver_options(CLI::App* sub, SolverOptions& o) {
  option(sub, "--p", o.p, "Polynomial degree(s)")->required()->check(CLI::Range(1, 30));
  option(sub, "--lambda", o.lambda, "Penalty parameter")->check(CLI::PositiveNumber)->capture_default_str();
  option(sub, "--tol", o.tol, "Stopping tolerance on the compatibility residual")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  option(sub, "--max-iter", o.max_iter, "Iteration limit")->check(CLI::Range(1, 100000))->capture_default_str();
  option(sub, "--mass-weight", o.mass_weight, "L2 weight of the inner product")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  option(sub, "--curl-weight", o.curl_weight, "curl weight of the inner product")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

void add_output_options(CLI::App* sub, OutputOptions& o) {
  option(sub, "--out", o.dir, "Output directory")->capture_default_str();
  flag(sub, "--vtk", o.vtk, "Write VTK snapshots");
  flag(sub, "--no-timing", o.no_timing, "Leave wall_ms empty so repeated runs give identical CSV");
}

void add_material_options(CLI::App* sub, PlateMaterial& m) {
  option(sub, "--E", m.E, "Young's modulus (Pa)")->capture_default_str();
  option(sub, "--nu", m.nu, "Poisson ratio")->capture_default_str();
  option(sub, "--thickness", m.tau, "Plate thickness (m)")->capture_default_str();
  option(sub, "--rho", m.rho, "Density (kg/m^3)")->capture_default_str();
}

Row row_of(const std::string& problem, int p, double h_or_m, double lambda, const SolveReport& rep, double wall_ms,
           double err = std::numeric_limits<double>::quiet_NaN()) {
  Row r;
  r.problem = problem;
  r.p = p;
  r.h_or_m = h_or_m;
  r.lambda = lambda;
  r.iterations = rep.iterations;
  r.converged = rep.converged;
  r.residual_final = rep.final_residual();
  r.error_rel_h2 = err;
  r.wall_ms = wall_ms;
  return r;
}

void write_fields(const OutputOptions& out, const std::string& stem, const ProblemRun& run) {
  if (!out.vtk) return;
  const LagrangeSpace& W = run.scalar_space();
  write_vtk(fs::path(out.dir) / (stem + ".vtk"), W.mesh(), std::max(W.degree(), 1),
            {{"w", &W, run.report.w}, {"gamma", &run.vector_space(), run.report.gamma}});
}

int load_vertex(const SimplicialMesh& mesh, const std::vector<double>& point, int vertex) {
  if (vertex >= 0) {
    if (vertex >= mesh.num_vertices()) throw std::invalid_argument("--load-vertex out of range");
    return vertex;
  }
  return nearest_vertex(mesh, Eigen::Map<const Eigen::VectorXd>(point.data(), static_cast<Eigen::Index>(point.size())));
}

void print_row(const Row& r) {
  std::cout << r.problem << " p=" << r.p << " iterations=" << r.iterations << " converged=" << (r.converged ? "yes" : "no")
            << " residual=" << r.residual_final;
  if (!std::isnan(r.error_rel_h2)) std::cout << " rel_H2_error=" << r.error_rel_h2;
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-order C1 finite elements through the iterated penalty method"};
  app.require_subcommand(1);

  MeshOptions mesh_opts;
  SolverOptions solver;
  OutputOptions out;
  PlateMaterial material;

  // mesh-gen
  auto* gen = app.add_subcommand("mesh-gen", "Generate a mesh and write it to a file");
  std::string gen_out;
  add_mesh_options(gen, mesh_opts);
  option(gen, "--out", gen_out, "Mesh file to write")->required();

  // plate-static
  auto* plate = app.add_subcommand("plate-static", "Kirchhoff plate under a point load");
  std::vector<double> load_point{0.66, 0.33};
  int load_vertex_index = -1;
  double load = 1e3;
  add_mesh_options(plate, mesh_opts);
  add_solver_options(plate, solver);
  add_output_options(plate, out);
  add_material_options(plate, material);
  option(plate, "--load", load, "Point load magnitude (N)")->capture_default_str();
  option(plate, "--load-point", load_point, "Load position; the nearest vertex is used")->expected(2)->capture_default_str();
  option(plate, "--load-vertex", load_vertex_index, "Load vertex index (overrides --load-point)");

  // plate-dynamic
  auto* dyn = app.add_subcommand("plate-dynamic", "Newmark time stepping of the plate released from its static deflection");
  NewmarkConfig newmark;
  std::string initial_acceleration = "zero";
  double static_lambda = 1e3;
  add_mesh_options(dyn, mesh_opts);
  add_solver_options(dyn, solver);
  add_output_options(dyn, out);
  add_material_options(dyn, material);
  option(dyn, "--load", load, "Point load magnitude of the static state")->capture_default_str();
  option(dyn, "--load-point", load_point, "Load position; the nearest vertex is used")->expected(2)->capture_default_str();
  option(dyn, "--load-vertex", load_vertex_index, "Load vertex index");
  option(dyn, "--static-lambda", static_lambda, "Penalty parameter of the static solve")->capture_default_str();
  option(dyn, "--dt", newmark.dt, "Time step (s)")->check(CLI::PositiveNumber)->capture_default_str();
  option(dyn, "--beta", newmark.beta, "Newmark beta")->check(CLI::NonNegativeNumber)->capture_default_str();
  option(dyn, "--delta", newmark.delta, "Newmark delta")->check(CLI::NonNegativeNumber)->capture_default_str();
  option(dyn, "--steps", newmark.steps, "Number of time steps")->check(CLI::NonNegativeNumber)->capture_default_str();
  option(dyn, "--initial-acceleration", initial_acceleration, "zero, or l2 (projection of the static forces)")
      ->check(CLI::IsMember({"zero", "l2"}))
      ->capture_default_str();
  option(dyn, "--initial-lambda", newmark.initial_penalty.lambda, "Penalty parameter of the initial projection")
      ->capture_default_str();

  // project3d
  auto* proj = app.add_subcommand("project3d", "H2 projection of sin(pi x) sin(pi y) sin(pi z) on the unit cube");
  std::vector<int> ms{1};
  add_solver_options(proj, solver);
  add_output_options(proj, out);
  auto* proj_mesh = option(proj, "--mesh", mesh_opts.file, "Mesh file (instead of --m)");
  option(proj, "--m", ms, "Freudenthal refinement level(s)")->check(CLI::Range(1, 8))->capture_default_str()->excludes(proj_mesh);

  // general4
  auto* gen4 = app.add_subcommand("general4", "General fourth-order problem with constant convection");
  std::vector<double> bvec{1.0, 0.0};
  double fconst = 1.0;
  std::string splitting = "standard";
  bool with_oracle = false;
  add_mesh_options(gen4, mesh_opts);
  add_solver_options(gen4, solver);
  add_output_options(gen4, out);
  option(gen4, "--b", bvec, "Convection vector")->capture_default_str();
  option(gen4, "--f", fconst, "Constant source")->capture_default_str();
  option(gen4, "--splitting", splitting, "standard or mass-in-a")
      ->check(CLI::IsMember({"standard", "mass-in-a"}))
      ->capture_default_str();
  flag(gen4, "--oracle", with_oracle, "Compare against the dense conforming solve");

  // l2project
  auto* l2 = app.add_subcommand("l2project", "L2 projection onto the C1 space");
  std::string data = "plate-acceleration";
  add_mesh_options(l2, mesh_opts);
  add_solver_options(l2, solver);
  add_output_options(l2, out);
  add_material_options(l2, material);
  option(l2, "--data", data, "sine, quadratic, zero or plate-acceleration")
      ->check(CLI::IsMember({"sine", "quadratic", "zero", "plate-acceleration"}))
      ->capture_default_str();
  option(l2, "--load-point", load_point, "Load position of the plate data")->expected(2)->capture_default_str();

  // verify-c1
  auto* ver = app.add_subcommand("verify-c1", "C1 diagnostics of a plate or general4 solution");
  std::string problem = "plate";
  add_mesh_options(ver, mesh_opts);
  add_solver_options(ver, solver);
  add_output_options(ver, out);
  option(ver, "--problem", problem, "plate or general4")->check(CLI::IsMember({"plate", "general4"}))->capture_default_str();

  // convergence
  auto* conv = app.add_subcommand("convergence", "Relative H2 error and slope of the 3D projection over m");
  std::vector<int> conv_ms{2, 3, 4};
  add_solver_options(conv, solver);
  add_output_options(conv, out);
  option(conv, "--m", conv_ms, "Refinement levels")->check(CLI::Range(1, 8))->capture_default_str();

  // kernel-dim
  auto* kd = app.add_subcommand("kernel-dim", "Dimension of the C1 space by two independent rank computations");
  double rtol = 1e-9;
  add_mesh_options(kd, mesh_opts);
  add_output_options(kd, out);
  option(kd, "--p", solver.p, "Polynomial degree(s)")->required()->check(CLI::Range(1, 30));
  option(kd, "--rtol", rtol, "Relative rank tolerance")->capture_default_str();

  // defaults that differ per subcommand; applied before the subcommand's own flags are read
  auto defaults = [&](CLI::App* sub, std::function<void()> set) { sub->preparse_callback([set](std::size_t) { set(); }); };
  auto plate_mesh = [&] {
    mesh_opts.square = 8;
    mesh_opts.perturb = 0.25;
  };
  defaults(plate, plate_mesh);
  defaults(dyn, [&] {
    plate_mesh();
    solver.lambda = 1e4;
  });
  defaults(l2, [&] {
    plate_mesh();
    solver.lambda = 2e4;
    solver.curl_weight = 0.0;
  });
  defaults(proj, [&] { solver.lambda = 1e4; });
  defaults(conv, [&] { solver.lambda = 1e4; });
  defaults(gen4, [&] {
    mesh_opts.square = 2;
    mesh_opts.tag = "clamped";
  });
  defaults(ver, [&] { mesh_opts.square = 2; });
  defaults(kd, [&] {
    mesh_opts.square = 1;
    mesh_opts.tag = "free";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (gen->parsed()) {
      const auto mesh = make_mesh(mesh_opts);
      write_mesh(*mesh, fs::path(gen_out));
      std::cout << "wrote " << gen_out << ": " << mesh->num_vertices() << " vertices, " << mesh->num_cells() << " cells\n";
      return kExitOk;
    }

    fs::create_directories(out.dir);
    for (const CLI::App* sub : app.get_subcommands()) write_config(*sub, fs::path(out.dir) / "config.txt");
    Report report(out);
    int status = kExitOk;

    if (plate->parsed() || dyn->parsed()) {
      const auto mesh = make_mesh(mesh_opts);
      const int v = load_vertex(*mesh, load_point, load_vertex_index);
      const double h = mesh_size(*mesh);
      for (int p : solver.p) {
        PenaltyOptions opts = solver.penalty();
        if (dyn->parsed()) opts.lambda = static_lambda;
        const ProblemRun st = solve_plate_static(mesh, p, material, load, v, opts);
        const Row r = row_of("plate-static", p, h, opts.lambda, st.report, st.wall_ms);
        report.add(r);
        print_row(r);
        write_fields(out, "plate_static_p" + std::to_string(p), st);
        if (!dyn->parsed() || !st.report.converged) continue;

        newmark.penalty = solver.penalty();
        newmark.project_initial_acceleration = initial_acceleration == "l2";
        std::ofstream energy(fs::path(out.dir) / ("energy_p" + std::to_string(p) + ".csv"));
        energy << "step,time,energy_gamma,energy_grad,iterations\n";
        try {
          const NewmarkResult nr = newmark_run(st.system->spaces, material, newmark, st.report.w, st.report.gamma);
          int max_it = 0;
          for (std::size_t n = 0; n < nr.energy_gamma.size(); ++n) {
            const int it = n ? nr.iterations[n - 1] : nr.initial_iterations;
            if (n) max_it = std::max(max_it, it);
            energy << n << ',' << fmt(static_cast<double>(n) * newmark.dt) << ',' << fmt(nr.energy_gamma[n]) << ','
                   << fmt(nr.energy_grad[n]) << ',' << it << '\n';
          }
          SolveReport summary;
          summary.iterations = max_it;
          summary.converged = true;
          summary.residuals = nr.residuals;
          report.add(row_of("plate-dynamic", p, h, newmark.penalty.lambda, summary, nr.wall_ms));
          std::cout << "plate-dynamic p=" << p << " steps=" << newmark.steps << " max_iterations=" << max_it
                    << " energy_deviation_gamma=" << energy_deviation(nr.energy_gamma)
                    << " energy_deviation_grad=" << energy_deviation(nr.energy_grad) << '\n';
          if (out.vtk) {
            write_vtk(fs::path(out.dir) / ("plate_dynamic_p" + std::to_string(p) + ".vtk"), *mesh, p,
                      {{"w", st.system->spaces.scalar.get(), nr.w}, {"w_t", st.system->spaces.scalar.get(), nr.w1}});
          }
        } catch (const NewmarkDivergence& e) {
          SolveReport failed;
          failed.iterations = e.step();
          report.add(row_of("plate-dynamic", p, h, newmark.penalty.lambda, failed, 0.0));
          std::cerr << "plate-dynamic p=" << p << ": " << e.what() << '\n';
        }
      }
    } else if (proj->parsed() || conv->parsed()) {
      const std::vector<int>& levels = conv->parsed() ? conv_ms : ms;
      std::ofstream slopes;
      if (conv->parsed()) {
        slopes.open(fs::path(out.dir) / "slopes.csv");
        slopes << "p,slope,m_values\n";
      }
      for (int p : solver.p) {
        std::vector<double> hs, errs;
        auto one = [&](const ProblemRun& run, double h_or_m, double h) {
          const Row r = row_of("project3d", p, h_or_m, solver.lambda, run.report, run.wall_ms, run.error_rel_h2);
          report.add(r);
          print_row(r);
          if (run.report.converged) {
            hs.push_back(h);
            errs.push_back(run.error_rel_h2);
          }
          write_fields(out, "project3d_p" + std::to_string(p) + "_m" + fmt(h_or_m), run);
        };
        if (!mesh_opts.file.empty() && proj->parsed()) {
          const auto mesh = make_mesh(mesh_opts);
          one(solve_projection_3d(mesh, p, solver.penalty()), mesh_size(*mesh), mesh_size(*mesh));
        } else {
          for (int m : levels) one(solve_projection_3d(m, p, solver.penalty()), m, 1.0 / m);
        }
        if (conv->parsed()) {
          std::string mlist;
          for (int m : levels) mlist += (mlist.empty() ? "" : " ") + std::to_string(m);
          const double slope = hs.size() >= 2 ? convergence_slope(hs, errs) : std::numeric_limits<double>::quiet_NaN();
          slopes << p << ',' << fmt(slope) << ',' << mlist << '\n';
          std::cout << "p=" << p << " slope=" << slope << '\n';
        }
      }
    } else if (gen4->parsed() || ver->parsed()) {
      const auto mesh = make_mesh(mesh_opts);
      const double h = mesh_size(*mesh);
      if (bvec.size() != static_cast<std::size_t>(mesh->dim)) throw std::invalid_argument("--b needs one entry per dimension");
      const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(bvec.data(), mesh->dim);
      std::ofstream diag;
      if (ver->parsed()) {
        diag.open(fs::path(out.dir) / "verify.csv");
        diag << "p,c1_jump,gradient_mismatch,oracle_h1_difference,dim_W\n";
      }
      for (int p : solver.p) {
        ProblemRun run;
        std::string name;
        if (ver->parsed() && problem == "plate") {
          name = "plate-static";
          run = solve_plate_static(mesh, p, material, load, nearest_vertex(*mesh, Eigen::Vector2d(0.66, 0.33)),
                                   solver.penalty());
        } else {
          name = "general4";
          run = solve_general_fourth_order(mesh, p, b, [fconst](const Eigen::VectorXd&) { return fconst; },
                                           solver.penalty(),
                                           splitting == "standard" ? Splitting::Standard : Splitting::MassInA,
                                           solver.weights());
        }
        const Row r = row_of(name, p, h, solver.lambda, run.report, run.wall_ms);
        report.add(r);
        print_row(r);
        write_fields(out, name + "_p" + std::to_string(p), run);
        if (ver->parsed() || with_oracle) {
          const double jump = c1_jump(run.scalar_space(), run.report.w);
          const double mismatch = gradient_mismatch(run.scalar_space(), run.report.w, run.vector_space(), run.report.gamma);
          double diff = std::numeric_limits<double>::quiet_NaN();
          int dim = -1;
          if (run.system->num_scalar() <= 1500) {
            const OracleResult o = oracle_conforming_solve(*run.system);
            dim = o.dimension();
            if (o.solved) diff = relative_h1_difference(run.scalar_space(), run.report.w, o.w);
          }
          std::cout << "  c1_jump=" << jump << " gradient_mismatch=" << mismatch << " oracle_h1_difference=" << diff
                    << " dim_W=" << dim << '\n';
          if (diag.is_open()) diag << p << ',' << fmt(jump) << ',' << fmt(mismatch) << ',' << fmt(diff) << ',' << dim << '\n';
        }
      }
    } else if (l2->parsed()) {
      const auto mesh = make_mesh(mesh_opts);
      const double h = mesh_size(*mesh);
      for (int p : solver.p) {
        ProblemRun run;
        if (data == "plate-acceleration") {
          const int v = nearest_vertex(*mesh, Eigen::Map<const Eigen::VectorXd>(load_point.data(), mesh->dim));
          const ProblemRun st = solve_plate_static(mesh, p, material, load, v, {1e3, solver.tol, solver.max_iter});
          report.add(row_of("plate-static", p, h, 1e3, st.report, st.wall_ms));
          const SparseMatrix As = assemble_form(plate_form(material), st.vector_space(), st.vector_space());
          const Eigen::VectorXd f1 = -(As * st.report.gamma) / (material.rho * material.tau);
          run = l2_project(st.system->spaces, {}, f1, solver.penalty(), solver.weights());
        } else {
          std::function<double(const Eigen::VectorXd&)> g = [](const Eigen::VectorXd&) { return 0.0; };
          if (data == "sine") g = sine_product(mesh->dim).value;
          if (data == "quadratic") g = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
          run = l2_project(mesh, p, g, solver.penalty(), solver.weights());
        }
        const Row r = row_of("l2project", p, h, solver.lambda, run.report, run.wall_ms);
        report.add(r);
        print_row(r);
        write_fields(out, "l2project_p" + std::to_string(p), run);
      }
    } else if (kd->parsed()) {
      const auto mesh = make_mesh(mesh_opts);
      std::ofstream f(fs::path(out.dir) / "kernel.csv");
      f << "p,dim_schur,gap_schur,dim_jumps,gap_jumps,borderline\n";
      for (int p : solver.p) {
        const KernelDimension a = kernel_dimension(mesh, p, rtol);
        const KernelDimension b = kernel_dimension_by_jumps(mesh, p, rtol);
        f << p << ',' << a.dimension << ',' << fmt(a.gap) << ',' << b.dimension << ',' << fmt(b.gap) << ','
          << ((a.borderline || b.borderline) ? "true" : "false") << '\n';
        std::cout << "p=" << p << " dim_W=" << a.dimension << " (jump count " << b.dimension << ")"
                  << (a.borderline || b.borderline ? " borderline gap" : "") << '\n';
        if (a.dimension != b.dimension) status = kExitNotConverged;
      }
      return status;
    }

    report.write();
    if (!report.all_converged()) status = kExitNotConverged;
    return status;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
}
