// pfcg: potential-field solver driver (solve, verify, bench).

#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using pfcg::cli::RunConfig;

void add_common(CLI::App* app, RunConfig& cfg, int& pc, std::string& upper, std::string& mesh_file,
                long& max_iter, std::string& out_dir) {
  app->set_config("--config", "", "key=value file; command-line flags take precedence");
  app->add_option("--nr", cfg.mesh.nr, "radial cells")->capture_default_str();
  app->add_option("--nt", cfg.mesh.nt, "theta cells")->capture_default_str();
  app->add_option("--np", cfg.mesh.np, "phi cells")->capture_default_str();
  app->add_option("--r0", cfg.mesh.r0, "inner radius")->capture_default_str();
  app->add_option("--r1", cfg.mesh.r1, "outer radius")->capture_default_str();
  app->add_option("--stretch", cfg.mesh.r_stretch, "radial geometric stretch ratio (>= 1)")
      ->capture_default_str();
  app->add_option("--mesh-file", mesh_file, "explicit face coordinates (overrides --nr/--nt/--np)");
  app->add_option("--upper", upper, "upper boundary: wall or ss")
      ->check(CLI::IsMember({"wall", "ss"}))
      ->capture_default_str();
  app->add_option("--map", cfg.map, "file:PATH | dipole | harmonic:L,M | random:SEED,LMAX")
      ->capture_default_str();
  app->add_option("--pc", pc, "preconditioner: 1 (diagonal) or 2 (block ILU0)")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  app->add_option("--tol", cfg.tol, "relative residual tolerance")->capture_default_str();
  app->add_option("--max-iter", max_iter, "iteration cap (default 10 x unknowns)");
  app->add_option("--workers", cfg.workers, "number of in-process workers")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
  app->add_flag("--nondeterministic-reduce", cfg.nondeterministic_reduce,
                "combine partial sums in arrival order");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Potential-field PCG solver on a spherical shell"};
  app.require_subcommand(1);
  app.fallthrough();  // inherited by the subcommands created below

  RunConfig cfg;
  int pc = 1;
  std::string upper = "ss";
  std::string mesh_file;
  long max_iter = 0;
  std::string out_dir = cfg.out_dir.string();
  std::string bench_list = "1,2,4,8";

  auto* solve = app.add_subcommand("solve", "solve once and write Phi, B and timing stats");
  auto* verify = app.add_subcommand("verify", "mesh-refinement study against the exact solution");
  auto* bench = app.add_subcommand("bench", "solve over a list of worker counts, CSV report");
  // Options live on the root so one flat config file serves every command;
  // fallthrough lets them follow the subcommand name as well.
  add_common(&app, cfg, pc, upper, mesh_file, max_iter, out_dir);
  app.add_option("--verify-levels", cfg.verify_levels, "verify: number of mesh doublings")
      ->capture_default_str();
  app.add_option("--bench-workers", bench_list, "bench: comma-separated worker counts")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : pfcg::cli::kConfigError;
  }

  cfg.pc = pc == 2 ? pfcg::PcKind::Ilu0 : pfcg::PcKind::Diagonal;
  cfg.upper = upper == "wall" ? pfcg::UpperBoundary::ClosedWall : pfcg::UpperBoundary::SourceSurface;
  if (!mesh_file.empty()) cfg.mesh_file = mesh_file;
  if (max_iter > 0) cfg.max_iter = max_iter;
  cfg.out_dir = out_dir;

  if (*solve) return pfcg::cli::cmd_solve(cfg, std::cout, std::cerr);
  if (*verify) return pfcg::cli::cmd_verify(cfg, cfg.verify_levels, std::cout, std::cerr);

  std::vector<int> workers;
  try {
    std::stringstream ss(bench_list);
    std::string item;
    while (std::getline(ss, item, ',')) workers.push_back(std::stoi(item));
  } catch (const std::exception&) {
    std::cerr << "configuration error: bad --bench-workers list '" << bench_list << "'\n";
    return pfcg::cli::kConfigError;
  }
  return pfcg::cli::cmd_bench(cfg, workers, std::cout, std::cerr);
}
