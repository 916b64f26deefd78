#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "pfcg/comm.hpp"
#include "pfcg/laplace.hpp"
#include "pfcg/mesh.hpp"
#include "pfcg/pcg.hpp"
#include "pfcg/topology.hpp"

namespace pfcg {

struct Problem {
  std::shared_ptr<const Grid3D> grid;
  std::shared_ptr<const BoundarySpec> bc;
};

struct RunOptions {
  CommOptions comm;
  /// Forces a (pr, pt, pp) split instead of decompose().
  std::optional<std::array<int, 3>> shape;
};

struct WorkerReport {
  int rank = 0;
  Block block;
  SolveStats stats;
};

struct RunResult {
  /// Global solution in natural (r-fastest) order.
  std::vector<double> x;
  /// Iteration data from rank 0 (identical on all ranks); each timer is
  /// the maximum over workers.
  SolveStats stats;
  std::vector<WorkerReport> workers;
  Topology topology;
};

/// Spawns one thread per worker, each assembling its block of the operator
/// and its own preconditioner, runs PCG cooperatively, and gathers x.
/// With a closed upper wall the gathered solution is shifted to zero
/// volume-weighted mean. The first worker error aborts every worker and is
/// rethrown here.
RunResult run_workers(int n_workers, const Problem& problem, const SolveConfig& cfg,
                      const RunOptions& opts = {});

}  // namespace pfcg
