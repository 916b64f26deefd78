#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pfcg/layout.hpp"
#include "pfcg/mesh.hpp"
#include "pfcg/pcg.hpp"
#include "pfcg/sparse.hpp"

namespace pfcg {

enum class UpperBoundary { ClosedWall, SourceSurface };
enum class Pole { North, South };

/// Scalar map on the theta-phi cell centers, theta fastest.
struct ScalarMap2D {
  int nt = 0;
  int np = 0;
  std::vector<double> values;
  std::vector<double> theta;
  std::vector<double> phi;

  double& at(int j, int k) { return values[static_cast<std::size_t>(j) + static_cast<std::size_t>(nt) * k]; }
  double at(int j, int k) const { return values[static_cast<std::size_t>(j) + static_cast<std::size_t>(nt) * k]; }

  /// Zero map carrying the grid's theta/phi center coordinates.
  static ScalarMap2D on_grid(const Grid3D& grid);
};

struct BoundarySpec {
  UpperBoundary upper = UpperBoundary::SourceSurface;
  /// Radial field at r0 (dPhi/dr on the inner face).
  ScalarMap2D br0;
};

/// Subtracts the area-weighted mean (weights sin(theta_j) dtheta_j dphi_k).
ScalarMap2D enforce_solvability(ScalarMap2D map, const Grid3D& grid);

/// Area-weighted mean of a surface map.
double area_weighted_mean(const ScalarMap2D& map, const Grid3D& grid);

/// Mean of a global interior vector weighted by cell_volume.
double volume_weighted_mean(const Grid3D& grid, std::span<const double> phi);

/// Ghost communication used by the operator: neighbor-block faces, the
/// periodic phi seam, and the sum over a polar ring.
class GhostExchange {
 public:
  virtual ~GhostExchange() = default;
  /// Fills every ghost cell that faces another block or the phi seam.
  virtual void exchange(GhostedArray& a) = 0;
  /// In-place sum of per-radius partial sums over all blocks on a pole ring.
  virtual void ring_reduce(Pole pole, std::span<double> sums) = 0;
};

/// Exchange for a single block covering the whole grid.
class SerialExchange final : public GhostExchange {
 public:
  void exchange(GhostedArray& a) override;
  void ring_reduce(Pole, std::span<double>) override {}
};

/// Which ghost values the boundary fill produces.
enum class GhostFill {
  /// Zero Neumann data at r0; the inhomogeneous part lives in the RHS.
  Homogeneous,
  /// Lower ghosts carry the Br data, as needed to evaluate grad(Phi).
  WithData,
};

/// Volume-scaled negative Laplacian on one block: -V * div grad.
///
/// Couplings inside the block are stored in a 7-band DiaMatrix. The lower
/// Neumann and the upper closed-wall/source-surface closures are folded
/// into its diagonal. Couplings to cells outside the block (neighbor blocks
/// and the phi seam) are applied matrix-free from the ghost layer. Pole
/// faces have zero area and carry no coupling; the pole ghosts still hold
/// the ring-averaged closure for gradient evaluation.
class LaplaceOperator {
 public:
  static LaplaceOperator assemble(std::shared_ptr<const Grid3D> grid,
                                  std::shared_ptr<const BoundarySpec> bc, const Block& block,
                                  std::shared_ptr<GhostExchange> halo);
  /// Whole-grid operator with a SerialExchange.
  static LaplaceOperator assemble(std::shared_ptr<const Grid3D> grid,
                                  std::shared_ptr<const BoundarySpec> bc);

  const DiaMatrix& matrix() const { return a_; }
  const Grid3D& grid() const { return *grid_; }
  const BoundarySpec& boundary() const { return *bc_; }
  const Block& block() const { return block_; }
  Extent3 extent() const { return block_.extent(); }
  std::size_t size() const { return block_.size(); }
  std::span<const double> diagonal() const { return a_.bands[a_.main_band()]; }

  bool on_pole(Pole pole) const;

  /// y = A x for a compact block vector. Uses internal ghost scratch.
  void apply(std::span<const double> x, std::span<double> y, Timers* timers = nullptr);
  /// y = A x where x is ghosted; ghosts are (re)filled homogeneously first.
  void apply(GhostedArray& x, std::span<double> y, Timers* timers = nullptr);

  /// Exchange plus physical closures.
  void fill_ghosts(GhostedArray& x, GhostFill mode);
  /// r ghosts and pole ghosts only.
  void fill_physical_ghosts(GhostedArray& x, GhostFill mode);

  /// Ring average (1 / 2 pi) sum_k Phi(i, j_adj, k) dphi_k for every local
  /// radius. Collective over the blocks on that pole ring.
  std::vector<double> polar_ring_average(const GhostedArray& x, Pole pole);

  /// Right-hand side of the block: -(face area) * Br on the innermost layer.
  std::vector<double> build_rhs() const;

  LinearMap as_linear_map();

 private:
  struct GhostLink {
    std::uint32_t row;
    std::uint32_t ghost;  // offset into the ghosted array
    double coef;
  };

  void stencil(const GhostedArray& x, std::span<const double> xc, std::span<double> y) const;

  std::shared_ptr<const Grid3D> grid_;
  std::shared_ptr<const BoundarySpec> bc_;
  std::shared_ptr<GhostExchange> halo_;
  Block block_;
  DiaMatrix a_;
  std::vector<GhostLink> links_;
  GhostedArray scratch_;
};

}  // namespace pfcg
