#pragma once

#include <span>
#include <vector>

#include "pfcg/laplace.hpp"
#include "pfcg/mesh.hpp"

namespace pfcg {

/// Cell-centered vector field, each component in natural (r-fastest) order.
struct VectorField3D {
  Extent3 dims;
  std::vector<double> br;
  std::vector<double> bt;
  std::vector<double> bp;
};

/// B = grad(Phi) by centered differences across neighboring centers.
/// `phi` covers the whole grid and its ghosts must already be filled.
VectorField3D gradient(const Grid3D& grid, const GhostedArray& phi);

/// Fills the ghosts of a global potential with the full boundary closure
/// (Br data included) and returns its gradient.
VectorField3D field_from_potential(std::shared_ptr<const Grid3D> grid,
                                   std::shared_ptr<const BoundarySpec> bc,
                                   std::span<const double> phi);

}  // namespace pfcg
