#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "pfcg/io.hpp"

namespace pfcg {

double real_spherical_harmonic(int l, int m, double theta, double phi) {
  if (l < 0 || std::abs(m) > l)
    throw ConfigError("invalid harmonic (l=" + std::to_string(l) + ", m=" + std::to_string(m) + ")");
  const auto ul = static_cast<unsigned>(l);
  const auto um = static_cast<unsigned>(std::abs(m));
  const double p = std::sph_legendre(ul, um, theta);
  if (m == 0) return p;
  const double ang = m > 0 ? std::cos(m * phi) : std::sin(-m * phi);
  return std::numbers::sqrt2 * p * ang;
}

ScalarMap2D synth_map(const MapSource& src, const Grid3D& grid) {
  ScalarMap2D map = ScalarMap2D::on_grid(grid);
  switch (src.kind) {
    case MapKind::Dipole:
      for (int k = 0; k < map.np; ++k)
        for (int j = 0; j < map.nt; ++j) map.at(j, k) = std::cos(map.theta[j]);
      break;
    case MapKind::Harmonic:
      real_spherical_harmonic(src.l, src.m, 0.0, 0.0);  // validates (l, m)
      for (int k = 0; k < map.np; ++k)
        for (int j = 0; j < map.nt; ++j)
          map.at(j, k) = real_spherical_harmonic(src.l, src.m, map.theta[j], map.phi[k]);
      break;
    case MapKind::Random: {
      if (src.lmax < 0) throw ConfigError("random map needs lmax >= 0");
      std::mt19937_64 rng(src.seed);
      std::normal_distribution<double> coef(0.0, 1.0);
      for (int l = 0; l <= src.lmax; ++l)
        for (int m = -l; m <= l; ++m) {
          const double c = coef(rng);
          for (int k = 0; k < map.np; ++k)
            for (int j = 0; j < map.nt; ++j)
              map.at(j, k) += c * real_spherical_harmonic(l, m, map.theta[j], map.phi[k]);
        }
      break;
    }
  }
  return enforce_solvability(std::move(map), grid);
}

}  // namespace pfcg
