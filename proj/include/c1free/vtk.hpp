#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "c1free/fespace.hpp"

namespace c1free {

/// A field to write: coefficients over `space`, scalar or vector valued.
struct VtkField {
  std::string name;
  const LagrangeSpace* space = nullptr;
  Eigen::VectorXd coefficients;
};

/// Legacy ASCII unstructured grid. Each cell is cut into subdivision^dim linear subcells on the
/// equispaced lattice and every field is evaluated at the lattice points (cell by cell, so
/// points on shared facets are repeated). Vector fields are padded to three components.
void write_vtk(const std::filesystem::path& path, const SimplicialMesh& mesh, int subdivision,
               const std::vector<VtkField>& fields);

}  // namespace c1free
