#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "pfcg/laplace.hpp"
#include "pfcg/layout.hpp"

namespace pfcg {

enum class Face { RLo = 0, RHi, TLo, THi, PLo, PHi };
inline constexpr std::array<Face, 6> kFaces = {Face::RLo, Face::RHi, Face::TLo,
                                               Face::THi, Face::PLo, Face::PHi};

constexpr Face opposite(Face f) {
  return static_cast<Face>(static_cast<int>(f) ^ 1);
}

/// Cartesian worker grid over (r, theta, phi), periodic in phi.
/// Ranks are row-major over (cr, ct, cp).
struct Topology {
  int pr = 1;
  int pt = 1;
  int pp = 1;
  Extent3 grid;
  std::vector<Block> blocks;

  int size() const { return pr * pt * pp; }
  std::array<int, 3> coords(int rank) const;
  int rank_of(int cr, int ct, int cp) const { return (cr * pt + ct) * pp + cp; }
  /// Neighbor across a face; empty at the r boundaries and the poles.
  std::optional<int> neighbor(int rank, Face f) const;
  bool on_ring(int rank, Pole pole) const;
  /// Ranks on one pole ring at radial coordinate cr, ordered by cp.
  std::vector<int> ring_members(Pole pole, int cr) const;
};

/// Cell counts per block along one axis; the first n % p blocks get one extra.
std::vector<int> split_axis(int n, int p);

/// Throws DecompositionError when any block would be thinner than 2 cells.
Topology make_topology(int pr, int pt, int pp, const Extent3& grid);

/// Largest surface-to-volume ratio, 2 (ab + bc + ca) / abc, over the blocks
/// of a (pr, pt, pp) split. Returns +inf for infeasible splits.
double max_surface_to_volume(int pr, int pt, int pp, const Extent3& grid);

/// Chooses the factor triple of n_workers minimizing the largest block
/// surface-to-volume ratio; ties go to the lexicographically smallest triple.
Topology decompose(int n_workers, const Extent3& grid);

/// Send/recv offsets into a worker's ghosted array, per face with a neighbor.
struct HaloPlan {
  struct FaceLink {
    Face face;
    int peer;
    std::vector<std::uint32_t> send;  // interior layer next to the face
    std::vector<std::uint32_t> recv;  // ghost layer on the face
  };
  std::vector<FaceLink> links;
};

HaloPlan build_halo_plan(const Topology& topo, int rank);

}  // namespace pfcg
