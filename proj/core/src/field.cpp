#include "pfcg/field.hpp"

namespace pfcg {

VectorField3D gradient(const Grid3D& grid, const GhostedArray& phi) {
  const Extent3 d = grid.dims();
  if (!(phi.extent() == d)) throw DimensionError("gradient: potential does not cover the grid");
  VectorField3D b{d, std::vector<double>(d.size()), std::vector<double>(d.size()),
                  std::vector<double>(d.size())};
  for (int k = 0; k < d.np; ++k) {
    const double dp = grid.p.center(k + 1) - grid.p.center(k - 1);
    for (int j = 0; j < d.nt; ++j) {
      const double dt = grid.t.center(j + 1) - grid.t.center(j - 1);
      for (int i = 0; i < d.nr; ++i) {
        const std::size_t m = interior_index(d, i, j, k);
        const double r = grid.r.center(i);
        const double dr = grid.r.center(i + 1) - grid.r.center(i - 1);
        b.br[m] = (phi(i + 1, j, k) - phi(i - 1, j, k)) / dr;
        b.bt[m] = (phi(i, j + 1, k) - phi(i, j - 1, k)) / (r * dt);
        b.bp[m] = (phi(i, j, k + 1) - phi(i, j, k - 1)) / (r * grid.sin_t[j] * dp);
      }
    }
  }
  return b;
}

VectorField3D field_from_potential(std::shared_ptr<const Grid3D> grid,
                                   std::shared_ptr<const BoundarySpec> bc,
                                   std::span<const double> phi) {
  LaplaceOperator op = LaplaceOperator::assemble(grid, bc);
  GhostedArray a(grid->dims());
  a.load_interior(phi);
  op.fill_ghosts(a, GhostFill::WithData);
  return gradient(*grid, a);
}

}  // namespace pfcg
