#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "commands.hpp"

using namespace pfcg;
using namespace pfcg::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pfcg_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

RunConfig small(const fs::path& out) {
  RunConfig c;
  c.mesh = {8, 8, 16, 1.0, 2.5, 1.0};
  c.out_dir = out;
  return c;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_exe(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(PFCG_EXE) + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(ParseMap, AcceptedForms) {
  EXPECT_EQ(parse_map("dipole").synth.kind, MapKind::Dipole);
  const MapChoice h = parse_map("harmonic:2,-1");
  EXPECT_EQ(h.synth.kind, MapKind::Harmonic);
  EXPECT_EQ(h.synth.l, 2);
  EXPECT_EQ(h.synth.m, -1);
  const MapChoice r = parse_map("random:7,5");
  EXPECT_EQ(r.synth.kind, MapKind::Random);
  EXPECT_EQ(r.synth.seed, 7u);
  EXPECT_EQ(r.synth.lmax, 5);
  EXPECT_EQ(parse_map("file:/tmp/x.pf3d").file, fs::path("/tmp/x.pf3d"));
  for (const char* bad : {"", "quadrupole", "harmonic:2", "harmonic:a,b", "random:1", "file:"})
    EXPECT_THROW(parse_map(bad), ConfigError) << bad;
}

TEST(RadialProfile, DipoleCoefficients) {
  const RadialProfile f = radial_profile(1, 1.0, 2.5, UpperBoundary::SourceSurface);
  EXPECT_NEAR(f.a, 1.0 / 32.25, 1e-15);
  EXPECT_NEAR(f.b, -15.625 / 32.25, 1e-15);
  EXPECT_NEAR(f(2.5), 0.0, 1e-15);
  const RadialProfile w = radial_profile(2, 1.0, 2.5, UpperBoundary::ClosedWall);
  // f'(r) = 2 a r - 3 b r^-4
  EXPECT_NEAR(2 * w.a - 3 * w.b, 1.0, 1e-14);
  EXPECT_NEAR(2 * w.a * 2.5 - 3 * w.b * std::pow(2.5, -4), 0.0, 1e-14);
}

TEST(Solve, DipoleConvergesAndWritesOutputs) {
  const fs::path out = scratch("solve_ok");
  RunConfig c = small(out);
  std::ostringstream so, se;
  ASSERT_EQ(cmd_solve(c, so, se), kOk) << se.str();
  for (const char* f : {"phi.pf3d", "br.pf3d", "bt.pf3d", "bp.pf3d", "stats.csv", "stats_history.csv"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  const std::string stats = read_text(out / "stats.csv");
  for (std::string_view t : kTimerNames) EXPECT_NE(stats.find(std::string(t) + ","), std::string::npos);
  EXPECT_NE(stats.find("\nio,"), std::string::npos);
  EXPECT_NE(stats.find("converged,1"), std::string::npos);

  // Loose analytic check of the potential at the innermost layer.
  const Problem p = load_problem(c);
  const auto phi = read_field(out / "phi.pf3d", *p.grid);
  const RadialProfile f = radial_profile(1, 1.0, 2.5, UpperBoundary::SourceSurface);
  const Extent3 d = p.grid->dims();
  double worst = 0.0;
  for (int k = 0; k < d.np; ++k)
    for (int j = 0; j < d.nt; ++j)
      for (int i = 0; i < d.nr; ++i)
        worst = std::max(worst, std::abs(phi[interior_index(d, i, j, k)] -
                                         f(p.grid->r.center(i)) * std::cos(p.grid->t.center(j))));
  EXPECT_LT(worst, 0.01);
  fs::remove_all(out);
}

TEST(Solve, WrongMapDimensionsIsConfigError) {
  const fs::path out = scratch("solve_dims");
  const Grid3D other = build_mesh({8, 6, 16});
  write_map(out / "map.pf3d", synth_map({MapKind::Dipole}, other));
  RunConfig c = small(out / "o");
  c.map = "file:" + (out / "map.pf3d").string();
  std::ostringstream so, se;
  EXPECT_EQ(cmd_solve(c, so, se), kConfigError);
  EXPECT_NE(se.str().find("configuration error"), std::string::npos);
  fs::remove_all(out);
}

TEST(Solve, FileMapMatchingGridIsAccepted) {
  const fs::path out = scratch("solve_file");
  RunConfig c = small(out);
  const Problem p = load_problem(c);
  write_map(out / "map.pf3d", synth_map({MapKind::Harmonic, 2, 1}, *p.grid));
  c.map = "file:" + (out / "map.pf3d").string();
  c.upper = UpperBoundary::ClosedWall;
  std::ostringstream so, se;
  EXPECT_EQ(cmd_solve(c, so, se), kOk) << se.str();
  fs::remove_all(out);
}

TEST(Solve, MaxIterOneIsNotConvergedWithStats) {
  const fs::path out = scratch("solve_maxiter");
  RunConfig c = small(out);
  c.max_iter = 1;
  std::ostringstream so, se;
  EXPECT_EQ(cmd_solve(c, so, se), kNotConverged);
  const std::string stats = read_text(out / "stats.csv");
  EXPECT_NE(stats.find("iterations,1\n"), std::string::npos);
  EXPECT_NE(stats.find("converged,0\n"), std::string::npos);
  fs::remove_all(out);
}

TEST(Solve, InvalidConfigurations) {
  const fs::path out = scratch("solve_bad");
  std::ostringstream so, se;
  RunConfig c = small(out);
  c.tol = 2.0;
  EXPECT_EQ(cmd_solve(c, so, se), kConfigError);
  c = small(out);
  c.mesh.nr = 1;
  EXPECT_EQ(cmd_solve(c, so, se), kConfigError);
  c = small(out);
  c.workers = 1000;
  EXPECT_EQ(cmd_solve(c, so, se), kConfigError);
  c = small(out);
  c.map = "harmonic:1,3";
  EXPECT_EQ(cmd_solve(c, so, se), kConfigError);
  fs::remove_all(out);
}

TEST(Verify, DipoleOrderWithinBounds) {
  RunConfig c;
  c.mesh = {8, 8, 16, 1.0, 2.5, 1.0};
  const VerifyReport r = run_verify(c, 3);
  ASSERT_EQ(r.order_linf.size(), 2u);
  for (double o : r.order_linf) {
    EXPECT_GE(o, 1.8);
    EXPECT_LE(o, 2.2);
  }
  EXPECT_TRUE(r.passed());
  for (std::size_t n = 1; n < r.levels.size(); ++n) {
    EXPECT_LT(r.levels[n].linf, r.levels[n - 1].linf);
    EXPECT_LT(r.levels[n].l2, r.levels[n - 1].l2);
  }
}

TEST(Verify, HarmonicSourceSurfaceOrder) {
  RunConfig c;
  c.mesh = {8, 8, 16, 1.0, 2.5, 1.0};
  c.map = "harmonic:2,1";
  const VerifyReport r = run_verify(c, 3);
  for (double o : r.order_linf) {
    EXPECT_GE(o, 1.8);
    EXPECT_LE(o, 2.2);
  }
}

TEST(Verify, SingleLevelHasNoOrder) {
  RunConfig c;
  c.mesh = {8, 8, 16, 1.0, 2.5, 1.0};
  std::ostringstream so, se;
  EXPECT_EQ(cmd_verify(c, 1, so, se), kOk);
  EXPECT_TRUE(run_verify(c, 1).order_linf.empty());
  c.map = "random:1,3";
  EXPECT_EQ(cmd_verify(c, 2, so, se), kConfigError);
}

TEST(Bench, SingleWorkerRow) {
  RunConfig c = small(scratch("bench1"));
  const auto rows = run_bench(c, {1});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].speedup, 1.0);
  EXPECT_TRUE(rows[0].converged);
  std::ostringstream csv;
  write_bench_csv(rows, csv);
  const std::string text = csv.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "workers,pr,pt,pp,status,iterations,converged,solve_seconds,matvec,precond,"
            "dot_allreduce,vector_ops,halo,setup,total,speedup");
  fs::remove_all(c.out_dir);
}

TEST(Bench, InfeasibleRowsSkippedAndRepeatable) {
  RunConfig c = small(scratch("bench2"));
  c.pc = PcKind::Ilu0;
  const auto a = run_bench(c, {1, 8, 1000});
  const auto b = run_bench(c, {1, 8, 1000});
  ASSERT_EQ(a.size(), 3u);
  EXPECT_TRUE(a[2].skipped);
  EXPECT_FALSE(a[2].reason.empty());
  for (std::size_t n = 0; n < 2; ++n) {
    EXPECT_FALSE(a[n].skipped);
    EXPECT_EQ(a[n].iterations, b[n].iterations);
  }
  // Block ILU0 drops couplings across blocks, so splitting never helps.
  EXPECT_GE(a[1].iterations, a[0].iterations);
  fs::remove_all(c.out_dir);
}

TEST(Executable, ExitCodesAndConfigFile) {
  const fs::path out = scratch("exe");
  const fs::path log = out / "log.txt";
  EXPECT_EQ(run_exe("solve --nr 6 --nt 6 --np 12 --out-dir " + (out / "a").string(), log), kOk)
      << read_text(log);
  EXPECT_TRUE(fs::exists(out / "a" / "stats.csv"));
  EXPECT_EQ(run_exe("solve --nr 6 --nt 6 --np 12 --max-iter 1 --out-dir " + (out / "b").string(), log),
            kNotConverged);
  EXPECT_EQ(run_exe("solve --pc 3", log), kConfigError);
  EXPECT_EQ(run_exe("solve --upper sideways", log), kConfigError);
  EXPECT_EQ(run_exe("frobnicate", log), kConfigError);

  // Values from the file apply; explicit flags win over them.
  {
    std::ofstream cfg(out / "run.ini");
    cfg << "nr=6\nnt=6\nnp=12\npc=2\nmax-iter=1\n";
  }
  EXPECT_EQ(run_exe("solve --config " + (out / "run.ini").string() + " --out-dir " + (out / "c").string(), log),
            kNotConverged);
  EXPECT_NE(read_text(log).find("grid 6x6x12"), std::string::npos) << read_text(log);
  EXPECT_EQ(run_exe("solve --config " + (out / "run.ini").string() + " --max-iter 5000 --out-dir " +
                        (out / "d").string(),
                    log),
            kOk)
      << read_text(log);

  EXPECT_EQ(run_exe("verify --nr 6 --nt 6 --np 12 --verify-levels 2", log), kOk) << read_text(log);
  EXPECT_EQ(run_exe("bench --nr 6 --nt 6 --np 12 --bench-workers 1,2 --out-dir " + (out / "e").string(), log),
            kOk)
      << read_text(log);
  EXPECT_TRUE(fs::exists(out / "e" / "bench.csv"));
  EXPECT_EQ(run_exe("bench --bench-workers 1,x", log), kConfigError);
  fs::remove_all(out);
}
