#pragma once

#include <string>

#include "osmium/assembly.hpp"

namespace osmium {

// Legacy ASCII VTK snapshot: continuous fields as POINT_DATA, DG fields and
// cell-averaged fluxes as CELL_DATA.
void write_vtk(const std::string& path, const DiscreteSystem& sys, const Eigen::VectorXd& u);

}  // namespace osmium
