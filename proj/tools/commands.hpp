#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pfcg/io.hpp"
#include "pfcg/laplace.hpp"
#include "pfcg/mesh.hpp"
#include "pfcg/pcg.hpp"
#include "pfcg/workers.hpp"

namespace pfcg::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kRuntimeError = 1,
  kConfigError = 2,
  kNotConverged = 3,
  kOrderTooLow = 4,
};

/// Where the Br map comes from: a PF3D file or a synthetic generator.
struct MapChoice {
  std::optional<std::filesystem::path> file;
  MapSource synth;
};

/// Parses `file:PATH`, `dipole`, `harmonic:L,M` or `random:SEED,LMAX`.
MapChoice parse_map(const std::string& text);

struct RunConfig {
  MeshSpec mesh{16, 16, 32, 1.0, 2.5, 1.0};
  std::optional<std::filesystem::path> mesh_file;
  UpperBoundary upper = UpperBoundary::SourceSurface;
  std::string map = "dipole";
  PcKind pc = PcKind::Diagonal;
  double tol = 1e-9;
  std::optional<long> max_iter;
  int workers = 1;
  std::filesystem::path out_dir = "pfcg_out";
  std::vector<int> bench_workers{1, 2, 4, 8};
  int verify_levels = 3;
  bool nondeterministic_reduce = false;

  SolveConfig solve_config() const;
  RunOptions run_options() const;
};

/// Grid and boundary data for a config; the IO part of the setup.
Problem load_problem(const RunConfig& cfg);

/// Convergence threshold enforced by `verify`.
inline constexpr double kMinObservedOrder = 1.8;

struct VerifyLevel {
  Extent3 dims;
  long iterations = 0;
  double linf = 0.0;
  double l2 = 0.0;
};

struct VerifyReport {
  std::vector<VerifyLevel> levels;
  std::vector<double> order_linf;  // between consecutive levels
  std::vector<double> order_l2;
  bool passed() const;
};

/// Radial profile f(r) = a r^l + b r^-(l+1) of the exact solution with
/// f'(r0) = 1 and either f(r1) = 0 (source surface) or f'(r1) = 0.
struct RadialProfile {
  int l = 1;
  double a = 0.0;
  double b = 0.0;
  double operator()(double r) const;
};
RadialProfile radial_profile(int l, double r0, double r1, UpperBoundary upper);

VerifyReport run_verify(const RunConfig& cfg, int levels);

struct BenchRow {
  int workers = 0;
  std::array<int, 3> shape{};
  bool skipped = false;
  std::string reason;
  long iterations = 0;
  bool converged = false;
  Timers timers;
  double speedup = 0.0;
};

std::vector<BenchRow> run_bench(const RunConfig& cfg, const std::vector<int>& worker_list);
void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out);

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, int levels, std::ostream& out, std::ostream& err);
int cmd_bench(const RunConfig& cfg, const std::vector<int>& worker_list, std::ostream& out,
              std::ostream& err);

}  // namespace pfcg::cli
