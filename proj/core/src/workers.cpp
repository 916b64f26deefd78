#include "pfcg/workers.hpp"

#include <algorithm>
#include <exception>
#include <iostream>
#include <thread>

#include "pfcg/precond.hpp"

namespace pfcg {

namespace {

SolveStats run_one(World& world, int rank, const Problem& problem, const SolveConfig& cfg,
                   std::span<double> global_x) {
  const Topology& topo = world.topology();
  const Block& block = topo.blocks[rank];
  auto comm = std::make_shared<WorkerComm>(world, rank);

  Timers setup;
  std::optional<LaplaceOperator> op;
  std::optional<DiagPC> pc1;
  std::optional<IluPC> pc2;
  std::vector<double> b;
  bool fallback = false;
  {
    ScopedTimer t(&setup, Timer::Setup);
    op.emplace(LaplaceOperator::assemble(problem.grid, problem.bc, block, comm));
    b = op->build_rhs();
    if (cfg.pc == PcKind::Ilu0) {
      double broke = 0.0;
      try {
        pc2.emplace(build_pc2(*op));
      } catch (const IluBreakdown&) {
        broke = 1.0;
      }
      // Fall back on every worker if any one of them broke down.
      comm->allreduce(std::span<double>(&broke, 1));
      if (broke > 0.0) {
        fallback = true;
        pc2.reset();
      }
    }
    if (!pc2) pc1.emplace(build_pc1(*op));
  }
  if (fallback && rank == 0)
    std::cerr << "warning: ILU0 breakdown, falling back to diagonal preconditioning\n";

  const LinearMap apply_m = pc2 ? as_linear_map(*pc2) : as_linear_map(*pc1);
  std::vector<double> x(op->size(), 0.0);
  SolveStats stats = pcg(op->as_linear_map(), apply_m, b, x, cfg, comm->reducer());
  stats.pc_fallback = fallback;
  stats.timers[Timer::Setup] = setup[Timer::Setup];
  stats.timers[Timer::Total] += setup[Timer::Setup];

  // Blocks are disjoint, so concurrent writes never overlap.
  gather(x, block, topo.grid, global_x);
  return stats;
}

}  // namespace

RunResult run_workers(int n_workers, const Problem& problem, const SolveConfig& cfg,
                      const RunOptions& opts) {
  cfg.validate();
  const Extent3 dims = problem.grid->dims();
  RunResult result;
  result.topology = opts.shape
                        ? make_topology((*opts.shape)[0], (*opts.shape)[1], (*opts.shape)[2], dims)
                        : decompose(n_workers, dims);
  if (result.topology.size() != n_workers)
    throw DecompositionError("forced shape does not match the worker count");

  SolveConfig wcfg = cfg;
  if (!wcfg.max_iter) wcfg.max_iter = 10 * static_cast<long>(dims.size());

  World world(result.topology, opts.comm);
  result.x.assign(dims.size(), 0.0);
  std::vector<SolveStats> stats(static_cast<std::size_t>(n_workers));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_workers));
  {
    std::vector<std::jthread> threads;
    threads.reserve(static_cast<std::size_t>(n_workers));
    for (int rank = 0; rank < n_workers; ++rank) {
      threads.emplace_back([&, rank] {
        try {
          stats[rank] = run_one(world, rank, problem, wcfg, result.x);
        } catch (...) {
          errors[rank] = std::current_exception();
          world.abort();
        }
      });
    }
  }

  // Prefer the originating error over the aborts it caused in other workers.
  std::exception_ptr first;
  for (const auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const CollectiveError&) {
      if (!first) first = e;
    } catch (...) {
      std::rethrow_exception(e);
    }
  }
  if (first) std::rethrow_exception(first);

  result.stats = stats[0];
  for (std::size_t t = 0; t < kNumTimers; ++t) {
    const auto cat = static_cast<Timer>(t);
    double mx = 0.0;
    for (const auto& s : stats) mx = std::max(mx, s.timers[cat]);
    result.stats.timers[cat] = mx;
  }
  for (int rank = 0; rank < n_workers; ++rank)
    result.workers.push_back({rank, result.topology.blocks[rank], stats[rank]});

  if (problem.bc->upper == UpperBoundary::ClosedWall) {
    const double mean = volume_weighted_mean(*problem.grid, result.x);
    for (double& v : result.x) v -= mean;
  }
  return result;
}

}  // namespace pfcg
