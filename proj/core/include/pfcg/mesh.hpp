#pragma once

#include <filesystem>
#include <numbers>
#include <vector>

#include "pfcg/layout.hpp"

namespace pfcg {

struct MeshSpec {
  int nr = 0;
  int nt = 0;
  int np = 0;
  double r0 = 1.0;
  double r1 = 2.5;
  /// Ratio between consecutive radial cell widths (1 = uniform).
  double r_stretch = 1.0;
};

/// One coordinate axis of a cell-centered mesh.
///
/// `centers` carries one ghost slot at each end, so the center of interior
/// cell c lives at centers[c + 1]. `dxh[f]` is the distance between
/// centers[f] and centers[f + 1], i.e. across face f.
struct Mesh1D {
  std::vector<double> faces;    // n + 1
  std::vector<double> centers;  // n + 2
  std::vector<double> dx;       // n
  std::vector<double> dxh;      // n + 1

  int size() const { return static_cast<int>(dx.size()); }
  /// Center of cell c for c in [-1, n].
  double center(int c) const { return centers[static_cast<std::size_t>(c + 1)]; }
};

/// Axis bounded by physical faces; ghost centers mirror across the end faces.
Mesh1D make_bounded_axis(std::vector<double> faces);
/// Axis that wraps with the given period; ghosts are periodic images.
Mesh1D make_periodic_axis(std::vector<double> faces, double period);

struct Grid3D {
  Mesh1D r;
  Mesh1D t;
  Mesh1D p;
  std::vector<double> sin_t;   // sin(theta) at the nt cell centers
  std::vector<double> sin_th;  // sin(theta) at the nt + 1 faces; exactly 0 at the poles

  Extent3 dims() const { return {r.size(), t.size(), p.size()}; }
};

/// Builds the grid from explicit face arrays. Theta faces must span [0, pi]
/// and phi faces [0, 2 pi]; both ends are snapped exactly when within 1e-12.
Grid3D grid_from_faces(std::vector<double> r_faces, std::vector<double> t_faces,
                       std::vector<double> p_faces);

Grid3D build_mesh(const MeshSpec& spec);

/// r_i^2 sin(theta_j) dr_i dtheta_j dphi_k.
double cell_volume(const Grid3D& grid, int i, int j, int k);

/// Reads a mesh file with one `axis n` header per axis followed by n+1 faces.
Grid3D read_mesh_file(const std::filesystem::path& path);

}  // namespace pfcg
