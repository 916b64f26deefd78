#include "pfcg/laplace.hpp"

#include <cmath>
#include <numbers>

namespace pfcg {

namespace {

// Face couplings of the volume-scaled stencil (face area over center
// distance, with the spherical metric). Global indices; `f` is a face index.
struct Couplings {
  const Grid3D& g;

  double radial(int f, int j, int k) const {
    const double rf = g.r.faces[f];
    return rf * rf * g.sin_t[j] * g.t.dx[j] * g.p.dx[k] / g.r.dxh[f];
  }
  double polar(int i, int f, int k) const {
    return g.r.dx[i] * g.sin_th[f] * g.p.dx[k] / g.t.dxh[f];
  }
  double azimuthal(int i, int j, int f) const {
    // The seam face is face 0 and face np at once; use one distance for both.
    if (f == g.p.size()) f = 0;
    return g.r.dx[i] * g.t.dx[j] / (g.sin_t[j] * g.p.dxh[f]);
  }
};

}  // namespace

ScalarMap2D ScalarMap2D::on_grid(const Grid3D& grid) {
  ScalarMap2D m;
  m.nt = grid.t.size();
  m.np = grid.p.size();
  m.values.assign(static_cast<std::size_t>(m.nt) * m.np, 0.0);
  m.theta.assign(grid.t.centers.begin() + 1, grid.t.centers.end() - 1);
  m.phi.assign(grid.p.centers.begin() + 1, grid.p.centers.end() - 1);
  return m;
}

double area_weighted_mean(const ScalarMap2D& map, const Grid3D& grid) {
  if (map.nt != grid.t.size() || map.np != grid.p.size())
    throw DimensionError("map dimensions do not match grid");
  // Shift by the first value so constant maps give their value exactly.
  const double ref = map.values.empty() ? 0.0 : map.values.front();
  double num = 0.0, den = 0.0;
  for (int k = 0; k < map.np; ++k)
    for (int j = 0; j < map.nt; ++j) {
      const double w = grid.sin_t[j] * grid.t.dx[j] * grid.p.dx[k];
      num += w * (map.at(j, k) - ref);
      den += w;
    }
  return ref + num / den;
}

ScalarMap2D enforce_solvability(ScalarMap2D map, const Grid3D& grid) {
  const double mean = area_weighted_mean(map, grid);
  for (double& v : map.values) v -= mean;
  return map;
}

double volume_weighted_mean(const Grid3D& grid, std::span<const double> phi) {
  const Extent3 d = grid.dims();
  if (phi.size() != d.size()) throw DimensionError("volume_weighted_mean: size mismatch");
  double num = 0.0, den = 0.0;
  for (int k = 0; k < d.np; ++k)
    for (int j = 0; j < d.nt; ++j)
      for (int i = 0; i < d.nr; ++i) {
        const double v = cell_volume(grid, i, j, k);
        num += v * phi[interior_index(d, i, j, k)];
        den += v;
      }
  return num / den;
}

void SerialExchange::exchange(GhostedArray& a) {
  const Extent3& e = a.extent();
  for (int j = 0; j < e.nt; ++j)
    for (int i = 0; i < e.nr; ++i) {
      a(i, j, -1) = a(i, j, e.np - 1);
      a(i, j, e.np) = a(i, j, 0);
    }
}

LaplaceOperator LaplaceOperator::assemble(std::shared_ptr<const Grid3D> grid,
                                          std::shared_ptr<const BoundarySpec> bc) {
  const Block whole = Block::whole(grid->dims());
  return assemble(std::move(grid), std::move(bc), whole, std::make_shared<SerialExchange>());
}

LaplaceOperator LaplaceOperator::assemble(std::shared_ptr<const Grid3D> grid,
                                          std::shared_ptr<const BoundarySpec> bc,
                                          const Block& block,
                                          std::shared_ptr<GhostExchange> halo) {
  const Grid3D& g = *grid;
  const Extent3 dims = g.dims();
  if (bc->br0.nt != dims.nt || bc->br0.np != dims.np)
    throw DimensionError("boundary map dimensions do not match grid");
  for (int ax = 0; ax < 3; ++ax)
    if (block.lo[ax] < 0 || block.hi[ax] > dims[ax] || block.count(ax) < 2)
      throw DimensionError("block out of grid or thinner than 2 cells");
  for (double s : g.sin_t)
    if (!(s > 0.0)) throw AssemblyError("degenerate grid: sin(theta) = 0 at a cell center");

  LaplaceOperator op;
  op.grid_ = std::move(grid);
  op.bc_ = std::move(bc);
  op.halo_ = std::move(halo);
  op.block_ = block;
  const Extent3 loc = block.extent();
  op.a_ = DiaMatrix::seven_point(loc);
  op.scratch_ = GhostedArray(loc);

  const Couplings c{g};
  const bool source_surface = op.bc_->upper == UpperBoundary::SourceSurface;
  auto& bands = op.a_.bands;
  const GhostedArray& layout = op.scratch_;

  for (int kl = 0; kl < loc.np; ++kl)
    for (int jl = 0; jl < loc.nt; ++jl)
      for (int il = 0; il < loc.nr; ++il) {
        const int i = il + block.lo[0], j = jl + block.lo[1], k = kl + block.lo[2];
        const std::size_t m = interior_index(loc, il, jl, kl);
        const auto row = static_cast<std::uint32_t>(m);
        double diag = 0.0;

        // Radial faces.
        const double c_rlo = c.radial(i, j, k);
        const double c_rhi = c.radial(i + 1, j, k);
        if (il > 0) {
          bands[2][m] = -c_rlo;
          diag += c_rlo;
        } else if (i > 0) {
          op.links_.push_back({row, static_cast<std::uint32_t>(layout.offset(-1, jl, kl)), -c_rlo});
          diag += c_rlo;
        }  // r0: Neumann ghost eliminated, no diagonal term
        if (il + 1 < loc.nr) {
          bands[4][m] = -c_rhi;
          diag += c_rhi;
        } else if (i + 1 < dims.nr) {
          op.links_.push_back({row, static_cast<std::uint32_t>(layout.offset(loc.nr, jl, kl)), -c_rhi});
          diag += c_rhi;
        } else if (source_surface) {
          // Phi = 0 on the outer face: odd reflection doubles the coupling.
          diag += 2.0 * c_rhi;
        }

        // Theta faces; pole faces have zero coupling.
        const double c_tlo = c.polar(i, j, k);
        const double c_thi = c.polar(i, j + 1, k);
        if (jl > 0) {
          bands[1][m] = -c_tlo;
          diag += c_tlo;
        } else if (j > 0) {
          op.links_.push_back({row, static_cast<std::uint32_t>(layout.offset(il, -1, kl)), -c_tlo});
          diag += c_tlo;
        }
        if (jl + 1 < loc.nt) {
          bands[5][m] = -c_thi;
          diag += c_thi;
        } else if (j + 1 < dims.nt) {
          op.links_.push_back({row, static_cast<std::uint32_t>(layout.offset(il, loc.nt, kl)), -c_thi});
          diag += c_thi;
        }

        // Phi faces; always coupled (periodic).
        const double c_plo = c.azimuthal(i, j, k);
        const double c_phi = c.azimuthal(i, j, k + 1);
        if (kl > 0) {
          bands[0][m] = -c_plo;
        } else {
          op.links_.push_back({row, static_cast<std::uint32_t>(layout.offset(il, jl, -1)), -c_plo});
        }
        if (kl + 1 < loc.np) {
          bands[6][m] = -c_phi;
        } else {
          op.links_.push_back({row, static_cast<std::uint32_t>(layout.offset(il, jl, loc.np)), -c_phi});
        }
        diag += c_plo + c_phi;

        bands[3][m] = diag;
      }
  return op;
}

bool LaplaceOperator::on_pole(Pole pole) const {
  return pole == Pole::North ? block_.lo[1] == 0 : block_.hi[1] == grid_->t.size();
}

void LaplaceOperator::stencil(const GhostedArray& x, std::span<const double> xc,
                              std::span<double> y) const {
  spmv_dia(a_, xc, y);
  const std::span<const double> raw = x.raw();
  for (const GhostLink& l : links_) y[l.row] += l.coef * raw[l.ghost];
}

void LaplaceOperator::apply(std::span<const double> x, std::span<double> y, Timers* timers) {
  if (x.size() != size() || y.size() != size()) throw DimensionError("apply: size mismatch");
  scratch_.load_interior(x);
  {
    ScopedTimer t(timers, Timer::Halo);
    fill_ghosts(scratch_, GhostFill::Homogeneous);
  }
  stencil(scratch_, x, y);
}

void LaplaceOperator::apply(GhostedArray& x, std::span<double> y, Timers* timers) {
  if (!(x.extent() == extent()) || y.size() != size()) throw DimensionError("apply: size mismatch");
  {
    ScopedTimer t(timers, Timer::Halo);
    fill_ghosts(x, GhostFill::Homogeneous);
  }
  std::vector<double> xc(size());
  x.store_interior(xc);
  stencil(x, xc, y);
}

void LaplaceOperator::fill_ghosts(GhostedArray& x, GhostFill mode) {
  halo_->exchange(x);
  fill_physical_ghosts(x, mode);
}

void LaplaceOperator::fill_physical_ghosts(GhostedArray& x, GhostFill mode) {
  const Grid3D& g = *grid_;
  const Extent3 loc = extent();
  if (!(x.extent() == loc)) throw DimensionError("fill_physical_ghosts: size mismatch");

  if (block_.lo[0] == 0) {
    const double h = g.r.dxh[0];
    for (int kl = 0; kl < loc.np; ++kl)
      for (int jl = 0; jl < loc.nt; ++jl) {
        const double data =
            mode == GhostFill::WithData ? bc_->br0.at(jl + block_.lo[1], kl + block_.lo[2]) : 0.0;
        x(-1, jl, kl) = x(0, jl, kl) - h * data;
      }
  }
  if (block_.hi[0] == g.r.size()) {
    const double sign = bc_->upper == UpperBoundary::SourceSurface ? -1.0 : 1.0;
    for (int kl = 0; kl < loc.np; ++kl)
      for (int jl = 0; jl < loc.nt; ++jl) x(loc.nr, jl, kl) = sign * x(loc.nr - 1, jl, kl);
  }
  // The pole value (midway between ghost and first ring) equals the ring average.
  if (on_pole(Pole::North)) {
    const std::vector<double> avg = polar_ring_average(x, Pole::North);
    for (int kl = 0; kl < loc.np; ++kl)
      for (int il = 0; il < loc.nr; ++il) x(il, -1, kl) = 2.0 * avg[il] - x(il, 0, kl);
  }
  if (on_pole(Pole::South)) {
    const std::vector<double> avg = polar_ring_average(x, Pole::South);
    for (int kl = 0; kl < loc.np; ++kl)
      for (int il = 0; il < loc.nr; ++il)
        x(il, loc.nt, kl) = 2.0 * avg[il] - x(il, loc.nt - 1, kl);
  }
}

std::vector<double> LaplaceOperator::polar_ring_average(const GhostedArray& x, Pole pole) {
  if (!on_pole(pole)) throw ProtocolError("polar_ring_average: block is not on that pole ring");
  const Extent3 loc = extent();
  const int jadj = pole == Pole::North ? 0 : loc.nt - 1;
  std::vector<double> sums(static_cast<std::size_t>(loc.nr), 0.0);
  for (int kl = 0; kl < loc.np; ++kl) {
    const double w = grid_->p.dx[kl + block_.lo[2]];
    for (int il = 0; il < loc.nr; ++il) sums[il] += x(il, jadj, kl) * w;
  }
  halo_->ring_reduce(pole, sums);
  for (double& s : sums) s /= 2.0 * std::numbers::pi;
  return sums;
}

std::vector<double> LaplaceOperator::build_rhs() const {
  const Grid3D& g = *grid_;
  const Extent3 loc = extent();
  std::vector<double> b(size(), 0.0);
  if (block_.lo[0] != 0) return b;
  const double r0 = g.r.faces[0];
  for (int kl = 0; kl < loc.np; ++kl)
    for (int jl = 0; jl < loc.nt; ++jl) {
      const int j = jl + block_.lo[1], k = kl + block_.lo[2];
      const double area = r0 * r0 * g.sin_t[j] * g.t.dx[j] * g.p.dx[k];
      b[interior_index(loc, 0, jl, kl)] = -area * bc_->br0.at(j, k);
    }
  return b;
}

LinearMap LaplaceOperator::as_linear_map() {
  return [this](std::span<const double> x, std::span<double> y, Timers& t) { apply(x, y, &t); };
}

}  // namespace pfcg
