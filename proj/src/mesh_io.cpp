#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "c1free/mesh.hpp"

namespace c1free {

namespace {

[[noreturn]] void parse_error(int line, const std::string& what) {
  throw std::runtime_error("mesh parse error (line " + std::to_string(line) + "): " + what);
}

// Line-oriented reader tracking line numbers for error messages.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::istringstream next(const char* expecting) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return std::istringstream(line);
    }
    parse_error(line_no_ + 1, std::string("unexpected end of file, expected ") + expecting);
  }

  int line() const { return line_no_; }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

void expect_end(std::istringstream& ls, int line) {
  std::string extra;
  if (ls >> extra) parse_error(line, "unexpected trailing token '" + extra + "'");
}

}  // namespace

void write_mesh(const SimplicialMesh& mesh, std::ostream& out) {
  out << "c1free-mesh 1 " << mesh.dim << ' ' << mesh.num_vertices() << ' ' << mesh.num_cells() << ' '
      << mesh.num_boundary_facets() << '\n';
  out << std::setprecision(17);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    for (int k = 0; k < mesh.dim; ++k) out << (k ? " " : "") << mesh.vertices(k, v);
    out << '\n';
  }
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int k = 0; k <= mesh.dim; ++k) out << (k ? " " : "") << mesh.cells(k, c);
    out << '\n';
  }
  for (int f = 0; f < mesh.num_boundary_facets(); ++f) {
    for (int k = 0; k < mesh.dim; ++k) out << mesh.boundary_facets(k, f) << ' ';
    out << to_string(mesh.boundary_tags[static_cast<std::size_t>(f)]) << '\n';
  }
}

void write_mesh(const SimplicialMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_mesh(mesh, out);
  if (!out) throw std::runtime_error("error while writing '" + path.string() + "'");
}

SimplicialMesh read_mesh(std::istream& in) {
  LineReader reader(in);
  auto header = reader.next("header");
  std::string magic;
  int version = 0, dim = 0, nv = -1, nc = -1, nbf = -1;
  if (!(header >> magic >> version >> dim >> nv >> nc >> nbf) || magic != "c1free-mesh") {
    parse_error(reader.line(), "malformed header, expected 'c1free-mesh 1 <dim> <nv> <nc> <nbf>'");
  }
  expect_end(header, reader.line());
  if (version != 1) parse_error(reader.line(), "unsupported format version " + std::to_string(version));
  if (dim != 2 && dim != 3) parse_error(reader.line(), "dimension must be 2 or 3");
  if (nv < 0 || nc < 0 || nbf < 0) parse_error(reader.line(), "negative entity count in header");

  SimplicialMesh mesh;
  mesh.dim = dim;
  mesh.vertices.resize(dim, nv);
  for (int v = 0; v < nv; ++v) {
    auto ls = reader.next("vertex coordinates");
    for (int k = 0; k < dim; ++k)
      if (!(ls >> mesh.vertices(k, v))) parse_error(reader.line(), "expected " + std::to_string(dim) + " coordinates");
    expect_end(ls, reader.line());
  }
  mesh.cells.resize(dim + 1, nc);
  for (int c = 0; c < nc; ++c) {
    auto ls = reader.next("cell");
    for (int k = 0; k <= dim; ++k) {
      if (!(ls >> mesh.cells(k, c))) parse_error(reader.line(), "expected " + std::to_string(dim + 1) + " vertex indices");
      if (mesh.cells(k, c) < 0 || mesh.cells(k, c) >= nv) parse_error(reader.line(), "cell vertex index out of range");
    }
    expect_end(ls, reader.line());
  }
  mesh.boundary_facets.resize(dim, nbf);
  for (int f = 0; f < nbf; ++f) {
    auto ls = reader.next("boundary facet");
    for (int k = 0; k < dim; ++k) {
      if (!(ls >> mesh.boundary_facets(k, f))) parse_error(reader.line(), "expected facet vertex indices");
      if (mesh.boundary_facets(k, f) < 0 || mesh.boundary_facets(k, f) >= nv) {
        parse_error(reader.line(), "facet vertex index out of range");
      }
    }
    std::string word;
    if (!(ls >> word)) parse_error(reader.line(), "missing boundary tag");
    try {
      mesh.boundary_tags.push_back(parse_boundary_tag(word));
    } catch (const std::invalid_argument& e) {
      parse_error(reader.line(), e.what());
    }
    expect_end(ls, reader.line());
  }
  const auto report = validate_mesh(mesh);
  if (!report.ok()) throw std::runtime_error("mesh validation failed:\n" + report.summary());
  return mesh;
}

SimplicialMesh read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file '" + path.string() + "'");
  return read_mesh(in);
}

}  // namespace c1free
