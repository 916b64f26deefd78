#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "pfcg/laplace.hpp"
#include "pfcg/pcg.hpp"
#include "pfcg/topology.hpp"

namespace pfcg {

struct CommOptions {
  /// Fixed rank-ordered tree sums. When false, partial sums are combined in
  /// arrival order, which is faster to reason about for timing only.
  bool deterministic = true;
  /// Longest a worker waits in a collective or receive before aborting.
  std::chrono::milliseconds timeout{std::chrono::minutes(5)};
};

/// Pairwise tree sum: level s combines v[i] += v[i + s] for i = 0, 2s, 4s, ...
/// Used for every collective so results are bitwise reproducible.
double tree_sum(std::span<const double> v);

class World;

/// Synchronizing all-reduce among a fixed set of ranks.
class ReduceGroup {
 public:
  ReduceGroup(World& world, std::vector<int> members);

  const std::vector<int>& members() const { return members_; }
  int index_of(int rank) const;
  /// Every member must call with the same length; all receive identical sums.
  void allreduce(int rank, std::span<double> values);
  void wake_all();

 private:
  World& world_;
  std::vector<int> members_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::uint64_t generation_ = 0;
  int arrived_ = 0;
  std::vector<std::vector<double>> slots_;
  // Indexed by generation parity: a slow waiter still reads round g while
  // the first arrival of round g + 1 fills the other buffer.
  std::vector<double> result_[2];
};

/// An in-process set of workers: ordered reliable point-to-point channels,
/// a global reduce group, and one reduce group per pole ring and radial row.
class World {
 public:
  World(const Topology& topo, CommOptions opts = {});
  World(const World&) = delete;
  World& operator=(const World&) = delete;

  const Topology& topology() const { return topo_; }
  const CommOptions& options() const { return opts_; }
  int size() const { return topo_.size(); }

  void allreduce(int rank, std::span<double> values);
  void ring_reduce(int rank, Pole pole, std::span<double> values);

  void send(int src, int dst, int tag, std::vector<double> payload);
  std::vector<double> recv(int dst, int src, int tag);

  /// Wakes every blocked worker with a CollectiveError.
  void abort();
  bool aborted() const { return aborted_.load(); }
  std::chrono::steady_clock::time_point deadline() const {
    return std::chrono::steady_clock::now() + opts_.timeout;
  }

 private:
  struct Mailbox {
    std::mutex mu;
    std::condition_variable cv;
    std::map<std::pair<int, int>, std::deque<std::vector<double>>> queues;
  };

  Topology topo_;
  CommOptions opts_;
  std::atomic<bool> aborted_{false};
  std::unique_ptr<ReduceGroup> global_;
  // Indexed [pole][cr].
  std::vector<std::unique_ptr<ReduceGroup>> rings_[2];
  std::vector<std::unique_ptr<Mailbox>> boxes_;
};

/// One worker's view of the world; plugs into the operator as its ghost
/// exchange and into pcg as its reducer.
class WorkerComm final : public GhostExchange {
 public:
  WorkerComm(World& world, int rank);

  int rank() const { return rank_; }
  const HaloPlan& plan() const { return plan_; }

  void exchange(GhostedArray& a) override;
  void ring_reduce(Pole pole, std::span<double> sums) override;
  void allreduce(std::span<double> values) { world_.allreduce(rank_, values); }
  Reducer reducer();

 private:
  World& world_;
  int rank_;
  HaloPlan plan_;
};

}  // namespace pfcg
