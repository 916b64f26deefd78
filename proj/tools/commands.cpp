#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "pfcg/field.hpp"

namespace pfcg::cli {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<long long> parse_ints(const std::string& text, std::size_t count, const std::string& what) {
  std::vector<long long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ConfigError("bad integer '" + item + "' in " + what);
    out.push_back(v);
  }
  if (out.size() != count) throw ConfigError(what + " expects " + std::to_string(count) + " integers");
  return out;
}

// Angular part of the exact solution for the synthetic map, or throws.
struct Angular {
  int l;
  int m;
  bool dipole;
  double operator()(double theta, double phi) const {
    return dipole ? std::cos(theta) : real_spherical_harmonic(l, m, theta, phi);
  }
};

Angular analytic_angular(const MapChoice& choice) {
  if (choice.file || choice.synth.kind == MapKind::Random)
    throw ConfigError("verify needs --map dipole or --map harmonic:L,M");
  if (choice.synth.kind == MapKind::Dipole) return {1, 0, true};
  if (choice.synth.l < 1) throw ConfigError("verify needs a harmonic with l >= 1");
  return {choice.synth.l, choice.synth.m, false};
}

void print_timers(const Timers& t, std::ostream& out) {
  for (std::size_t c = 0; c < kNumTimers; ++c)
    out << "  " << std::left << std::setw(14) << kTimerNames[c] << std::right << std::fixed
        << std::setprecision(4) << t.seconds()[c] << " s\n";
  out.unsetf(std::ios::floatfield);
}

}  // namespace

MapChoice parse_map(const std::string& text) {
  MapChoice c;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "file") {
    if (args.empty()) throw ConfigError("--map file:PATH needs a path");
    c.file = args;
  } else if (kind == "dipole" && colon == std::string::npos) {
    c.synth.kind = MapKind::Dipole;
  } else if (kind == "harmonic") {
    const auto v = parse_ints(args, 2, "harmonic:L,M");
    c.synth.kind = MapKind::Harmonic;
    c.synth.l = static_cast<int>(v[0]);
    c.synth.m = static_cast<int>(v[1]);
    if (c.synth.l < 0 || std::abs(c.synth.m) > c.synth.l)
      throw ConfigError("harmonic needs l >= 0 and |m| <= l");
  } else if (kind == "random") {
    const auto v = parse_ints(args, 2, "random:SEED,LMAX");
    if (v[0] < 0 || v[1] < 0) throw ConfigError("random needs SEED >= 0 and LMAX >= 0");
    c.synth.kind = MapKind::Random;
    c.synth.seed = static_cast<std::uint64_t>(v[0]);
    c.synth.lmax = static_cast<int>(v[1]);
  } else {
    throw ConfigError("unknown map source '" + text + "'");
  }
  return c;
}

SolveConfig RunConfig::solve_config() const {
  SolveConfig s;
  s.tol = tol;
  s.max_iter = max_iter;
  s.pc = pc;
  s.validate();
  return s;
}

RunOptions RunConfig::run_options() const {
  RunOptions o;
  o.comm.deterministic = !nondeterministic_reduce;
  return o;
}

Problem load_problem(const RunConfig& cfg) {
  auto grid = std::make_shared<Grid3D>(cfg.mesh_file ? read_mesh_file(*cfg.mesh_file)
                                                     : build_mesh(cfg.mesh));
  const MapChoice choice = parse_map(cfg.map);
  BoundarySpec bc;
  bc.upper = cfg.upper;
  if (choice.file) {
    bc.br0 = read_map(*choice.file, *grid);
    // A closed box only has a solution for zero net flux.
    if (cfg.upper == UpperBoundary::ClosedWall) bc.br0 = enforce_solvability(std::move(bc.br0), *grid);
  } else {
    bc.br0 = synth_map(choice.synth, *grid);
  }
  return {std::move(grid), std::make_shared<const BoundarySpec>(std::move(bc))};
}

double RadialProfile::operator()(double r) const {
  return a * std::pow(r, l) + b * std::pow(r, -(l + 1));
}

RadialProfile radial_profile(int l, double r0, double r1, UpperBoundary upper) {
  if (l < 1) throw ConfigError("radial profile needs l >= 1");
  // Rows: f'(r0) = 1, then f(r1) = 0 or f'(r1) = 0.
  auto dfa = [l](double r) { return l * std::pow(r, l - 1); };
  auto dfb = [l](double r) { return -(l + 1) * std::pow(r, -(l + 2)); };
  const double m11 = dfa(r0), m12 = dfb(r0);
  const double m21 = upper == UpperBoundary::SourceSurface ? std::pow(r1, l) : dfa(r1);
  const double m22 = upper == UpperBoundary::SourceSurface ? std::pow(r1, -(l + 1)) : dfb(r1);
  const double det = m11 * m22 - m12 * m21;
  return {l, m22 / det, -m21 / det};
}

bool VerifyReport::passed() const {
  for (double o : order_linf)
    if (!(o >= kMinObservedOrder)) return false;
  return true;
}

VerifyReport run_verify(const RunConfig& cfg, int levels) {
  if (levels < 1) throw ConfigError("--verify-levels must be >= 1");
  if (cfg.mesh_file) throw ConfigError("verify refines the generated mesh; drop --mesh-file");
  const Angular ang = analytic_angular(parse_map(cfg.map));
  const RadialProfile f = radial_profile(ang.l, cfg.mesh.r0, cfg.mesh.r1, cfg.upper);

  VerifyReport rep;
  for (int lev = 0; lev < levels; ++lev) {
    RunConfig c = cfg;
    const int s = 1 << lev;
    c.mesh.nr *= s;
    c.mesh.nt *= s;
    c.mesh.np *= s;
    // Square-rooting the ratio per doubling keeps the coarse faces nested.
    c.mesh.r_stretch = std::pow(cfg.mesh.r_stretch, 1.0 / s);
    const Problem prob = load_problem(c);
    const RunResult res = run_workers(c.workers, prob, c.solve_config(), c.run_options());
    const Grid3D& g = *prob.grid;
    const Extent3 d = g.dims();

    std::vector<double> exact(d.size());
    for (int k = 0; k < d.np; ++k)
      for (int j = 0; j < d.nt; ++j)
        for (int i = 0; i < d.nr; ++i)
          exact[interior_index(d, i, j, k)] =
              f(g.r.center(i)) * ang(g.t.center(j), g.p.center(k));
    // The closed-wall solution is only defined up to a constant.
    const double shift =
        cfg.upper == UpperBoundary::ClosedWall ? volume_weighted_mean(g, exact) : 0.0;

    VerifyLevel out{d, res.stats.iterations, 0.0, 0.0};
    double vol = 0.0, sq = 0.0;
    for (int k = 0; k < d.np; ++k)
      for (int j = 0; j < d.nt; ++j)
        for (int i = 0; i < d.nr; ++i) {
          const std::size_t m = interior_index(d, i, j, k);
          const double e = std::abs(res.x[m] - (exact[m] - shift));
          const double v = cell_volume(g, i, j, k);
          out.linf = std::max(out.linf, e);
          sq += v * e * e;
          vol += v;
        }
    out.l2 = std::sqrt(sq / vol);
    rep.levels.push_back(out);
  }
  for (std::size_t n = 1; n < rep.levels.size(); ++n) {
    rep.order_linf.push_back(std::log2(rep.levels[n - 1].linf / rep.levels[n].linf));
    rep.order_l2.push_back(std::log2(rep.levels[n - 1].l2 / rep.levels[n].l2));
  }
  return rep;
}

std::vector<BenchRow> run_bench(const RunConfig& cfg, const std::vector<int>& worker_list) {
  if (worker_list.empty()) throw ConfigError("--bench-workers needs at least one entry");
  const Problem prob = load_problem(cfg);
  const SolveConfig scfg = cfg.solve_config();
  std::vector<BenchRow> rows;
  double base = 0.0;
  for (int w : worker_list) {
    BenchRow row;
    row.workers = w;
    try {
      const Topology topo = decompose(w, prob.grid->dims());
      row.shape = {topo.pr, topo.pt, topo.pp};
      const RunResult res = run_workers(w, prob, scfg, cfg.run_options());
      row.iterations = res.stats.iterations;
      row.converged = res.stats.converged;
      row.timers = res.stats.timers;
      const double t = row.timers[Timer::Total];
      if (rows.empty() || base == 0.0) base = t;
      row.speedup = t > 0.0 ? base / t : 0.0;
    } catch (const DecompositionError& e) {
      row.skipped = true;
      row.reason = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << "workers,pr,pt,pp,status,iterations,converged,solve_seconds";
  for (auto name : kTimerNames) out << ',' << name;
  out << ",speedup\n";
  out << std::setprecision(6);
  for (const auto& r : rows) {
    out << r.workers << ',' << r.shape[0] << ',' << r.shape[1] << ',' << r.shape[2] << ','
        << (r.skipped ? "skipped" : "ok") << ',' << r.iterations << ',' << (r.converged ? 1 : 0)
        << ',' << r.timers[Timer::Total];
    for (double s : r.timers.seconds()) out << ',' << s;
    out << ',' << r.speedup << '\n';
  }
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Problem prob;
  SolveConfig scfg;
  double io_seconds = 0.0;
  try {
    const auto t0 = std::chrono::steady_clock::now();
    scfg = cfg.solve_config();
    prob = load_problem(cfg);
    io_seconds += seconds_since(t0);
  } catch (const Error& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  }

  RunResult res;
  try {
    res = run_workers(cfg.workers, prob, scfg, cfg.run_options());
  } catch (const DecompositionError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "solve failed: " << e.what() << '\n';
    return kRuntimeError;
  }

  try {
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(cfg.out_dir);
    const VectorField3D b = field_from_potential(prob.grid, prob.bc, res.x);
    write_field(cfg.out_dir / "phi.pf3d", *prob.grid, res.x);
    write_field(cfg.out_dir / "br.pf3d", *prob.grid, b.br);
    write_field(cfg.out_dir / "bt.pf3d", *prob.grid, b.bt);
    write_field(cfg.out_dir / "bp.pf3d", *prob.grid, b.bp);
    io_seconds += seconds_since(t0);
    write_stats_csv(res.stats, cfg.out_dir / "stats.csv", io_seconds);
  } catch (const std::exception& e) {
    err << "output failed: " << e.what() << '\n';
    return kRuntimeError;
  }

  const Extent3 d = prob.grid->dims();
  out << "grid " << d.nr << "x" << d.nt << "x" << d.np << ", workers " << cfg.workers << " ("
      << res.topology.pr << "," << res.topology.pt << "," << res.topology.pp << "), PC"
      << static_cast<int>(scfg.pc) << (res.stats.pc_fallback ? " (fell back to PC1)" : "") << '\n';
  out << "iterations " << res.stats.iterations << ", converged " << (res.stats.converged ? "yes" : "no")
      << ", residual " << std::scientific << std::setprecision(3) << res.stats.final_residual()
      << ", true residual " << res.stats.true_residual << '\n';
  out.unsetf(std::ios::floatfield);
  out << "solve timers (max over workers):\n";
  print_timers(res.stats.timers, out);
  out << "io (excluded above) " << std::fixed << std::setprecision(4) << io_seconds << " s\n";
  out.unsetf(std::ios::floatfield);
  out << "wrote " << cfg.out_dir.string() << "/{phi,br,bt,bp}.pf3d, stats.csv, stats_history.csv\n";
  return res.stats.converged ? kOk : kNotConverged;
}

int cmd_verify(const RunConfig& cfg, int levels, std::ostream& out, std::ostream& err) {
  VerifyReport rep;
  try {
    rep = run_verify(cfg, levels);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DecompositionError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "verify failed: " << e.what() << '\n';
    return kRuntimeError;
  }
  out << std::setw(16) << "grid" << std::setw(8) << "iters" << std::setw(14) << "L2 error"
      << std::setw(14) << "Linf error" << std::setw(10) << "order2" << std::setw(10) << "orderInf"
      << '\n';
  for (std::size_t n = 0; n < rep.levels.size(); ++n) {
    const auto& lv = rep.levels[n];
    std::ostringstream g;
    g << lv.dims.nr << "x" << lv.dims.nt << "x" << lv.dims.np;
    out << std::setw(16) << g.str() << std::setw(8) << lv.iterations << std::scientific
        << std::setprecision(4) << std::setw(14) << lv.l2 << std::setw(14) << lv.linf;
    out.unsetf(std::ios::floatfield);
    if (n > 0)
      out << std::fixed << std::setprecision(3) << std::setw(10) << rep.order_l2[n - 1]
          << std::setw(10) << rep.order_linf[n - 1];
    out.unsetf(std::ios::floatfield);
    out << '\n';
  }
  if (rep.order_linf.empty()) return kOk;
  if (!rep.passed()) {
    err << "observed order below " << kMinObservedOrder << '\n';
    return kOrderTooLow;
  }
  out << "observed Linf order >= " << kMinObservedOrder << " at every refinement\n";
  return kOk;
}

int cmd_bench(const RunConfig& cfg, const std::vector<int>& worker_list, std::ostream& out,
              std::ostream& err) {
  std::vector<BenchRow> rows;
  try {
    rows = run_bench(cfg, worker_list);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "bench failed: " << e.what() << '\n';
    return kRuntimeError;
  }
  write_bench_csv(rows, out);
  try {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream f(cfg.out_dir / "bench.csv");
    write_bench_csv(rows, f);
  } catch (const std::exception& e) {
    err << "could not write bench.csv: " << e.what() << '\n';
    return kRuntimeError;
  }
  for (const auto& r : rows)
    if (r.skipped) err << "workers=" << r.workers << " skipped: " << r.reason << '\n';
  return kOk;
}

}  // namespace pfcg::cli
