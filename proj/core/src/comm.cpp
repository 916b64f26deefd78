#include "pfcg/comm.hpp"

#include <algorithm>
#include <string>

namespace pfcg {

double tree_sum(std::span<const double> v) {
  if (v.empty()) return 0.0;
  std::vector<double> w(v.begin(), v.end());
  for (std::size_t s = 1; s < w.size(); s *= 2)
    for (std::size_t i = 0; i + s < w.size(); i += 2 * s) w[i] += w[i + s];
  return w[0];
}

ReduceGroup::ReduceGroup(World& world, std::vector<int> members)
    : world_(world), members_(std::move(members)), slots_(members_.size()) {}

int ReduceGroup::index_of(int rank) const {
  auto it = std::find(members_.begin(), members_.end(), rank);
  return it == members_.end() ? -1 : static_cast<int>(it - members_.begin());
}

void ReduceGroup::wake_all() {
  std::lock_guard lock(mu_);
  cv_.notify_all();
}

void ReduceGroup::allreduce(int rank, std::span<double> values) {
  const int me = index_of(rank);
  if (me < 0) throw ProtocolError("rank " + std::to_string(rank) + " is not a member of this group");
  const std::size_t m = members_.size();

  std::unique_lock lock(mu_);
  if (world_.aborted()) throw CollectiveError("collective aborted");
  const std::uint64_t gen = generation_;
  std::vector<double>& result = result_[gen & 1];
  if (arrived_ > 0 && values.size() != result.size()) {
    lock.unlock();
    world_.abort();
    throw ProtocolError("allreduce: members passed different lengths");
  }
  if (arrived_ == 0) result.assign(values.size(), 0.0);
  const std::size_t slot = world_.options().deterministic ? static_cast<std::size_t>(me)
                                                         : static_cast<std::size_t>(arrived_);
  slots_[slot].assign(values.begin(), values.end());

  if (++arrived_ == static_cast<int>(m)) {
    std::vector<double> column(m);
    for (std::size_t e = 0; e < values.size(); ++e) {
      for (std::size_t s = 0; s < m; ++s) column[s] = slots_[s][e];
      result[e] = tree_sum(column);
    }
    arrived_ = 0;
    ++generation_;
    cv_.notify_all();
  } else {
    const auto deadline = world_.deadline();
    while (generation_ == gen) {
      if (world_.aborted()) throw CollectiveError("collective aborted");
      if (cv_.wait_until(lock, deadline) == std::cv_status::timeout && generation_ == gen) {
        lock.unlock();
        world_.abort();
        throw CollectiveError("collective timed out");
      }
    }
  }
  std::copy(result.begin(), result.end(), values.begin());
}

World::World(const Topology& topo, CommOptions opts) : topo_(topo), opts_(opts) {
  std::vector<int> all(static_cast<std::size_t>(topo_.size()));
  for (int r = 0; r < topo_.size(); ++r) all[r] = r;
  global_ = std::make_unique<ReduceGroup>(*this, std::move(all));
  for (Pole pole : {Pole::North, Pole::South}) {
    auto& rings = rings_[static_cast<int>(pole)];
    for (int cr = 0; cr < topo_.pr; ++cr)
      rings.push_back(std::make_unique<ReduceGroup>(*this, topo_.ring_members(pole, cr)));
  }
  for (int r = 0; r < topo_.size(); ++r) boxes_.push_back(std::make_unique<Mailbox>());
}

void World::allreduce(int rank, std::span<double> values) { global_->allreduce(rank, values); }

void World::ring_reduce(int rank, Pole pole, std::span<double> values) {
  if (!topo_.on_ring(rank, pole))
    throw ProtocolError("rank " + std::to_string(rank) + " called a pole-ring reduction off the ring");
  const int cr = topo_.coords(rank)[0];
  rings_[static_cast<int>(pole)][cr]->allreduce(rank, values);
}

void World::send(int src, int dst, int tag, std::vector<double> payload) {
  if (aborted()) throw CollectiveError("send after abort");
  Mailbox& box = *boxes_[dst];
  {
    std::lock_guard lock(box.mu);
    box.queues[{src, tag}].push_back(std::move(payload));
  }
  box.cv.notify_all();
}

std::vector<double> World::recv(int dst, int src, int tag) {
  Mailbox& box = *boxes_[dst];
  std::unique_lock lock(box.mu);
  const auto deadline = this->deadline();
  auto& q = box.queues[{src, tag}];
  while (q.empty()) {
    if (aborted()) throw CollectiveError("receive aborted");
    if (box.cv.wait_until(lock, deadline) == std::cv_status::timeout && q.empty()) {
      lock.unlock();
      abort();
      throw CollectiveError("receive timed out");
    }
  }
  std::vector<double> out = std::move(q.front());
  q.pop_front();
  return out;
}

void World::abort() {
  aborted_.store(true);
  global_->wake_all();
  for (auto& rings : rings_)
    for (auto& g : rings) g->wake_all();
  for (auto& box : boxes_) {
    std::lock_guard lock(box->mu);
    box->cv.notify_all();
  }
}

WorkerComm::WorkerComm(World& world, int rank)
    : world_(world), rank_(rank), plan_(build_halo_plan(world.topology(), rank)) {}

void WorkerComm::exchange(GhostedArray& a) {
  std::span<double> raw = a.raw();
  for (const auto& link : plan_.links) {
    std::vector<double> buf(link.send.size());
    for (std::size_t n = 0; n < buf.size(); ++n) buf[n] = raw[link.send[n]];
    world_.send(rank_, link.peer, static_cast<int>(link.face), std::move(buf));
  }
  for (const auto& link : plan_.links) {
    // The peer sent through its opposite face.
    const std::vector<double> buf =
        world_.recv(rank_, link.peer, static_cast<int>(opposite(link.face)));
    if (buf.size() != link.recv.size())
      throw ProtocolError("halo message size " + std::to_string(buf.size()) + " != expected " +
                          std::to_string(link.recv.size()));
    for (std::size_t n = 0; n < buf.size(); ++n) raw[link.recv[n]] = buf[n];
  }
}

void WorkerComm::ring_reduce(Pole pole, std::span<double> sums) {
  world_.ring_reduce(rank_, pole, sums);
}

Reducer WorkerComm::reducer() {
  return [this](std::span<double> v) { allreduce(v); };
}

}  // namespace pfcg
