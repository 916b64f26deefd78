#include "pfcg/mesh.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace pfcg {

namespace {

void check_faces(const std::vector<double>& faces, const char* axis) {
  if (faces.size() < 3)
    throw ConfigError(std::string("axis ") + axis + ": need at least 2 cells");
  for (std::size_t f = 0; f + 1 < faces.size(); ++f) {
    if (!std::isfinite(faces[f]) || !(faces[f + 1] > faces[f]))
      throw ConfigError(std::string("axis ") + axis + ": faces must be strictly increasing");
  }
}

void fill_widths(Mesh1D& m) {
  const std::size_t n = m.faces.size() - 1;
  m.dx.resize(n);
  for (std::size_t c = 0; c < n; ++c) m.dx[c] = m.faces[c + 1] - m.faces[c];
  m.dxh.resize(n + 1);
  for (std::size_t f = 0; f <= n; ++f) m.dxh[f] = m.centers[f + 1] - m.centers[f];
}

std::vector<double> uniform_faces(double a, double b, int n) {
  std::vector<double> f(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) f[i] = a + (b - a) * (static_cast<double>(i) / n);
  f.front() = a;
  f.back() = b;
  return f;
}

void snap(double& v, double target) {
  if (std::abs(v - target) <= 1e-12) v = target;
}

}  // namespace

Mesh1D make_bounded_axis(std::vector<double> faces) {
  check_faces(faces, "bounded");
  Mesh1D m;
  const std::size_t n = faces.size() - 1;
  m.centers.resize(n + 2);
  for (std::size_t c = 0; c < n; ++c) m.centers[c + 1] = 0.5 * (faces[c] + faces[c + 1]);
  m.centers[0] = 2.0 * faces.front() - m.centers[1];
  m.centers[n + 1] = 2.0 * faces.back() - m.centers[n];
  m.faces = std::move(faces);
  fill_widths(m);
  return m;
}

Mesh1D make_periodic_axis(std::vector<double> faces, double period) {
  check_faces(faces, "periodic");
  if (std::abs((faces.back() - faces.front()) - period) > 1e-12 * period)
    throw ConfigError("periodic axis faces must span exactly one period");
  Mesh1D m;
  const std::size_t n = faces.size() - 1;
  m.centers.resize(n + 2);
  for (std::size_t c = 0; c < n; ++c) m.centers[c + 1] = 0.5 * (faces[c] + faces[c + 1]);
  m.centers[0] = m.centers[n] - period;
  m.centers[n + 1] = m.centers[1] + period;
  m.faces = std::move(faces);
  fill_widths(m);
  return m;
}

Grid3D grid_from_faces(std::vector<double> r_faces, std::vector<double> t_faces,
                       std::vector<double> p_faces) {
  constexpr double pi = std::numbers::pi;
  if (r_faces.empty() || !(r_faces.front() > 0.0))
    throw ConfigError("radial faces must start at a positive radius");
  if (t_faces.size() < 3 || p_faces.size() < 3)
    throw ConfigError("theta and phi need at least 2 cells");
  snap(t_faces.front(), 0.0);
  snap(t_faces.back(), pi);
  snap(p_faces.front(), 0.0);
  snap(p_faces.back(), 2.0 * pi);
  if (t_faces.front() != 0.0 || t_faces.back() != pi)
    throw ConfigError("theta faces must span [0, pi]");
  if (p_faces.front() != 0.0 || p_faces.back() != 2.0 * pi)
    throw ConfigError("phi faces must span [0, 2 pi]");

  Grid3D g;
  g.r = make_bounded_axis(std::move(r_faces));
  g.t = make_bounded_axis(std::move(t_faces));
  g.p = make_periodic_axis(std::move(p_faces), 2.0 * pi);

  const int nt = g.t.size();
  g.sin_t.resize(nt);
  for (int j = 0; j < nt; ++j) {
    g.sin_t[j] = std::sin(g.t.center(j));
    if (!(g.sin_t[j] > 0.0)) throw ConfigError("theta center on a pole");
  }
  g.sin_th.resize(static_cast<std::size_t>(nt) + 1);
  for (int f = 1; f < nt; ++f) g.sin_th[f] = std::sin(g.t.faces[f]);
  // Pole faces have zero area.
  g.sin_th.front() = 0.0;
  g.sin_th.back() = 0.0;
  return g;
}

Grid3D build_mesh(const MeshSpec& spec) {
  constexpr double pi = std::numbers::pi;
  if (spec.nr < 2 || spec.nt < 2 || spec.np < 2)
    throw ConfigError("cell counts must be >= 2 in every direction");
  if (!(spec.r0 > 0.0) || !(spec.r1 > spec.r0))
    throw ConfigError("radial bounds must satisfy 0 < r0 < r1");
  if (!(spec.r_stretch >= 1.0) || !std::isfinite(spec.r_stretch))
    throw ConfigError("radial stretch must be >= 1");

  std::vector<double> rf;
  if (spec.r_stretch == 1.0) {
    rf = uniform_faces(spec.r0, spec.r1, spec.nr);
  } else {
    // Widths h, h s, h s^2, ... summing to r1 - r0.
    const double s = spec.r_stretch;
    const double h = (spec.r1 - spec.r0) * (s - 1.0) / (std::pow(s, spec.nr) - 1.0);
    rf.resize(static_cast<std::size_t>(spec.nr) + 1);
    rf[0] = spec.r0;
    double w = h;
    for (int i = 1; i <= spec.nr; ++i) {
      rf[i] = rf[i - 1] + w;
      w *= s;
    }
    rf.back() = spec.r1;
  }
  return grid_from_faces(std::move(rf), uniform_faces(0.0, pi, spec.nt),
                         uniform_faces(0.0, 2.0 * pi, spec.np));
}

double cell_volume(const Grid3D& grid, int i, int j, int k) {
  const Extent3 d = grid.dims();
  if (i < 0 || i >= d.nr || j < 0 || j >= d.nt || k < 0 || k >= d.np)
    throw IndexError("cell_volume: index out of range");
  const double r = grid.r.center(i);
  return r * r * grid.sin_t[j] * grid.r.dx[i] * grid.t.dx[j] * grid.p.dx[k];
}

Grid3D read_mesh_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mesh file " + path.string());
  std::map<char, std::vector<double>> axes;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream hs(line);
    std::string name;
    long n = 0;
    if (!(hs >> name)) continue;  // blank line
    if (!(hs >> n) || n < 2)
      throw ConfigError("mesh file: bad section header '" + line + "'");
    char key;
    if (name == "r")
      key = 'r';
    else if (name == "t" || name == "theta")
      key = 't';
    else if (name == "p" || name == "phi")
      key = 'p';
    else
      throw ConfigError("mesh file: unknown axis '" + name + "'");
    if (axes.count(key)) throw ConfigError("mesh file: duplicate axis '" + name + "'");
    std::vector<double> faces;
    faces.reserve(static_cast<std::size_t>(n) + 1);
    while (faces.size() < static_cast<std::size_t>(n) + 1 && std::getline(in, line)) {
      std::istringstream vs(line);
      double v;
      if (vs >> v) faces.push_back(v);
    }
    if (faces.size() != static_cast<std::size_t>(n) + 1)
      throw ConfigError("mesh file: axis '" + name + "' has too few faces");
    axes[key] = std::move(faces);
  }
  for (char key : {'r', 't', 'p'})
    if (!axes.count(key)) throw ConfigError(std::string("mesh file: missing axis ") + key);
  return grid_from_faces(std::move(axes['r']), std::move(axes['t']), std::move(axes['p']));
}

std::vector<double> scatter(std::span<const double> global, const Extent3& dims, const Block& b) {
  if (global.size() != dims.size()) throw DimensionError("scatter: size mismatch");
  std::vector<double> local(b.size());
  std::size_t m = 0;
  for (int k = b.lo[2]; k < b.hi[2]; ++k)
    for (int j = b.lo[1]; j < b.hi[1]; ++j) {
      const std::size_t base = interior_index(dims, b.lo[0], j, k);
      for (int i = 0; i < b.count(0); ++i) local[m++] = global[base + i];
    }
  return local;
}

void gather(std::span<const double> local, const Block& b, const Extent3& dims,
            std::span<double> global) {
  if (global.size() != dims.size() || local.size() != b.size())
    throw DimensionError("gather: size mismatch");
  std::size_t m = 0;
  for (int k = b.lo[2]; k < b.hi[2]; ++k)
    for (int j = b.lo[1]; j < b.hi[1]; ++j) {
      const std::size_t base = interior_index(dims, b.lo[0], j, k);
      for (int i = 0; i < b.count(0); ++i) global[base + i] = local[m++];
    }
}

}  // namespace pfcg
