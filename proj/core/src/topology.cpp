#include "pfcg/topology.hpp"

#include <limits>
#include <string>

namespace pfcg {

namespace {

__extension__ typedef unsigned __int128 u128;

// Surface-to-volume of an a x b x c block as the exact fraction num / den.
struct Ratio {
  u128 num;
  u128 den;
  bool operator<(const Ratio& o) const { return num * o.den < o.num * den; }
  bool operator==(const Ratio& o) const { return num * o.den == o.num * den; }
};

std::optional<Ratio> worst_ratio(int pr, int pt, int pp, const Extent3& g) {
  // The thinnest blocks (floor sizes) have the largest ratio.
  const int a = g.nr / pr, b = g.nt / pt, c = g.np / pp;
  if (a < 2 || b < 2 || c < 2) return std::nullopt;
  const u128 ua = static_cast<u128>(a), ub = static_cast<u128>(b), uc = static_cast<u128>(c);
  return Ratio{2 * (ua * ub + ub * uc + uc * ua), ua * ub * uc};
}

}  // namespace

std::array<int, 3> Topology::coords(int rank) const {
  return {rank / (pt * pp), (rank / pp) % pt, rank % pp};
}

std::optional<int> Topology::neighbor(int rank, Face f) const {
  auto [cr, ct, cp] = coords(rank);
  switch (f) {
    case Face::RLo: return cr > 0 ? std::optional(rank_of(cr - 1, ct, cp)) : std::nullopt;
    case Face::RHi: return cr + 1 < pr ? std::optional(rank_of(cr + 1, ct, cp)) : std::nullopt;
    case Face::TLo: return ct > 0 ? std::optional(rank_of(cr, ct - 1, cp)) : std::nullopt;
    case Face::THi: return ct + 1 < pt ? std::optional(rank_of(cr, ct + 1, cp)) : std::nullopt;
    case Face::PLo: return rank_of(cr, ct, (cp + pp - 1) % pp);
    case Face::PHi: return rank_of(cr, ct, (cp + 1) % pp);
  }
  return std::nullopt;
}

bool Topology::on_ring(int rank, Pole pole) const {
  const int ct = coords(rank)[1];
  return pole == Pole::North ? ct == 0 : ct == pt - 1;
}

std::vector<int> Topology::ring_members(Pole pole, int cr) const {
  const int ct = pole == Pole::North ? 0 : pt - 1;
  std::vector<int> out;
  for (int cp = 0; cp < pp; ++cp) out.push_back(rank_of(cr, ct, cp));
  return out;
}

std::vector<int> split_axis(int n, int p) {
  std::vector<int> sizes(static_cast<std::size_t>(p), n / p);
  for (int b = 0; b < n % p; ++b) ++sizes[b];
  return sizes;
}

Topology make_topology(int pr, int pt, int pp, const Extent3& grid) {
  if (pr < 1 || pt < 1 || pp < 1) throw DecompositionError("worker counts must be positive");
  if (!worst_ratio(pr, pt, pp, grid))
    throw DecompositionError("split (" + std::to_string(pr) + "," + std::to_string(pt) + "," +
                             std::to_string(pp) + ") leaves blocks thinner than 2 cells");
  Topology t;
  t.pr = pr;
  t.pt = pt;
  t.pp = pp;
  t.grid = grid;
  const std::array<std::vector<int>, 3> sizes = {split_axis(grid.nr, pr), split_axis(grid.nt, pt),
                                                 split_axis(grid.np, pp)};
  std::array<std::vector<int>, 3> starts;
  for (int ax = 0; ax < 3; ++ax) {
    int s = 0;
    for (int n : sizes[ax]) {
      starts[ax].push_back(s);
      s += n;
    }
  }
  t.blocks.resize(static_cast<std::size_t>(t.size()));
  for (int rank = 0; rank < t.size(); ++rank) {
    const auto c = t.coords(rank);
    Block& b = t.blocks[rank];
    for (int ax = 0; ax < 3; ++ax) {
      b.lo[ax] = starts[ax][c[ax]];
      b.hi[ax] = b.lo[ax] + sizes[ax][c[ax]];
    }
  }
  return t;
}

double max_surface_to_volume(int pr, int pt, int pp, const Extent3& grid) {
  const auto r = worst_ratio(pr, pt, pp, grid);
  if (!r) return std::numeric_limits<double>::infinity();
  return static_cast<double>(r->num) / static_cast<double>(r->den);
}

Topology decompose(int n_workers, const Extent3& grid) {
  if (n_workers < 1) throw DecompositionError("need at least one worker");
  std::optional<Ratio> best;
  std::array<int, 3> best_triple{};
  // Lexicographic enumeration, so strict improvement keeps the smallest tie.
  for (int pr = 1; pr <= n_workers; ++pr) {
    if (n_workers % pr) continue;
    for (int pt = 1; pt <= n_workers / pr; ++pt) {
      if ((n_workers / pr) % pt) continue;
      const int pp = n_workers / (pr * pt);
      const auto r = worst_ratio(pr, pt, pp, grid);
      if (r && (!best || *r < *best)) {
        best = r;
        best_triple = {pr, pt, pp};
      }
    }
  }
  if (!best)
    throw DecompositionError("no feasible decomposition of " + std::to_string(n_workers) +
                             " workers with blocks of at least 2 cells");
  return make_topology(best_triple[0], best_triple[1], best_triple[2], grid);
}

HaloPlan build_halo_plan(const Topology& topo, int rank) {
  const Extent3 e = topo.blocks[rank].extent();
  const GhostedArray layout(e);
  HaloPlan plan;
  for (Face f : kFaces) {
    const auto peer = topo.neighbor(rank, f);
    if (!peer) continue;
    HaloPlan::FaceLink link{f, *peer, {}, {}};
    auto add = [&](int si, int sj, int sk, int gi, int gj, int gk) {
      link.send.push_back(static_cast<std::uint32_t>(layout.offset(si, sj, sk)));
      link.recv.push_back(static_cast<std::uint32_t>(layout.offset(gi, gj, gk)));
    };
    switch (f) {
      case Face::RLo:
      case Face::RHi: {
        const int s = f == Face::RLo ? 0 : e.nr - 1, g = f == Face::RLo ? -1 : e.nr;
        for (int k = 0; k < e.np; ++k)
          for (int j = 0; j < e.nt; ++j) add(s, j, k, g, j, k);
        break;
      }
      case Face::TLo:
      case Face::THi: {
        const int s = f == Face::TLo ? 0 : e.nt - 1, g = f == Face::TLo ? -1 : e.nt;
        for (int k = 0; k < e.np; ++k)
          for (int i = 0; i < e.nr; ++i) add(i, s, k, i, g, k);
        break;
      }
      case Face::PLo:
      case Face::PHi: {
        const int s = f == Face::PLo ? 0 : e.np - 1, g = f == Face::PLo ? -1 : e.np;
        for (int j = 0; j < e.nt; ++j)
          for (int i = 0; i < e.nr; ++i) add(i, j, s, i, j, g);
        break;
      }
    }
    plan.links.push_back(std::move(link));
  }
  return plan;
}

}  // namespace pfcg
