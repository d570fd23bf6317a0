#pragma once

#include "plates/mesh.hpp"

#include <Eigen/Core>

#include <string>

namespace plates {

// Legacy ASCII VTK unstructured grid of the tets of k with one vector per
// vertex (rows of `values`) and its magnitude.
void write_vtk(const std::string& path, const SimplicialComplex3& k, const Eigen::MatrixX3d& values,
               const std::string& title);

}  // namespace plates
