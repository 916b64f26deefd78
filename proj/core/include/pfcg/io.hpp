#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "pfcg/laplace.hpp"
#include "pfcg/mesh.hpp"
#include "pfcg/pcg.hpp"

namespace pfcg {

/// PF3D binary layout, all little-endian:
///   "PF3D" | u32 version | u32 ndim | u32 dims[ndim] |
///   f64 coords for each axis | f64 payload (first axis fastest)
inline constexpr std::uint32_t kFieldFileVersion = 1;

struct FieldFile {
  std::vector<std::uint32_t> dims;
  std::vector<std::vector<double>> coords;
  std::vector<double> payload;
};

void write_field_file(const std::filesystem::path& path, const FieldFile& f);
/// Throws BadMagicError, UnsupportedVersionError, TruncatedError or
/// MalformedError; never returns partial data.
FieldFile read_field_file(const std::filesystem::path& path);

void write_map(const std::filesystem::path& path, const ScalarMap2D& map);
ScalarMap2D read_map(const std::filesystem::path& path);
/// Refuses (DimensionMismatchError) maps whose size or theta/phi centers
/// differ from the grid's.
ScalarMap2D read_map(const std::filesystem::path& path, const Grid3D& grid);

/// Writes a cell-centered scalar over the whole grid.
void write_field(const std::filesystem::path& path, const Grid3D& grid,
                 std::span<const double> values);
std::vector<double> read_field(const std::filesystem::path& path, const Grid3D& grid);

/// Sibling residual-history file: stats.csv -> stats_history.csv.
std::filesystem::path history_path_for(const std::filesystem::path& stats_path);

/// `category,seconds` rows for every timer, a `sum` row, an optional `io`
/// row, then iterations, converged and final_residual. The residual history
/// goes to history_path_for(path).
void write_stats_csv(const SolveStats& stats, const std::filesystem::path& path,
                     std::optional<double> io_seconds = std::nullopt);
void write_history_csv(std::span<const double> history, const std::filesystem::path& path);

enum class MapKind { Dipole, Harmonic, Random };

struct MapSource {
  MapKind kind = MapKind::Dipole;
  int l = 1;
  int m = 0;
  std::uint64_t seed = 0;
  int lmax = 4;
};

/// Real spherical harmonic: sqrt(2) N P_l^|m| cos(m phi) for m > 0,
/// sqrt(2) N P_l^|m| sin(|m| phi) for m < 0.
double real_spherical_harmonic(int l, int m, double theta, double phi);

/// Samples a synthetic Br map at the grid's centers and removes its
/// area-weighted mean. Throws ConfigError for invalid (l, m).
ScalarMap2D synth_map(const MapSource& src, const Grid3D& grid);

}  // namespace pfcg
