#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "pfcg/errors.hpp"

namespace pfcg {

/// Cell counts of a (sub)domain in r, theta, phi order.
struct Extent3 {
  int nr = 0;
  int nt = 0;
  int np = 0;

  std::size_t size() const {
    return static_cast<std::size_t>(nr) * nt * np;
  }
  int operator[](int axis) const { return axis == 0 ? nr : axis == 1 ? nt : np; }
  friend bool operator==(const Extent3&, const Extent3&) = default;
};

/// Compact interior ordering: r fastest, then theta, then phi.
inline std::size_t interior_index(const Extent3& e, int i, int j, int k) {
  return static_cast<std::size_t>(i) +
         static_cast<std::size_t>(e.nr) *
             (static_cast<std::size_t>(j) + static_cast<std::size_t>(e.nt) * k);
}

/// Half-open global index box [lo, hi) owned by one worker.
struct Block {
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{0, 0, 0};

  static Block whole(const Extent3& e) { return {{0, 0, 0}, {e.nr, e.nt, e.np}}; }

  int count(int axis) const { return hi[axis] - lo[axis]; }
  Extent3 extent() const { return {count(0), count(1), count(2)}; }
  std::size_t size() const { return extent().size(); }
  friend bool operator==(const Block&, const Block&) = default;
};

/// Cell-centered array with one ghost layer on every side.
/// Logical indices run from -1 to n inclusive on each axis.
class GhostedArray {
 public:
  GhostedArray() = default;
  explicit GhostedArray(Extent3 e)
      : e_(e),
        sr_(1),
        st_(e.nr + 2),
        sp_(static_cast<std::size_t>(e.nr + 2) * (e.nt + 2)),
        data_(static_cast<std::size_t>(e.nr + 2) * (e.nt + 2) * (e.np + 2), 0.0) {}

  const Extent3& extent() const { return e_; }

  std::size_t offset(int i, int j, int k) const {
    return static_cast<std::size_t>(i + 1) * sr_ + static_cast<std::size_t>(j + 1) * st_ +
           static_cast<std::size_t>(k + 1) * sp_;
  }
  double& operator()(int i, int j, int k) { return data_[offset(i, j, k)]; }
  double operator()(int i, int j, int k) const { return data_[offset(i, j, k)]; }

  std::span<double> raw() { return data_; }
  std::span<const double> raw() const { return data_; }

  /// Copies a compact interior vector into the interior cells.
  void load_interior(std::span<const double> x) {
    if (x.size() != e_.size()) throw DimensionError("load_interior: size mismatch");
    std::size_t m = 0;
    for (int k = 0; k < e_.np; ++k)
      for (int j = 0; j < e_.nt; ++j) {
        double* row = &data_[offset(0, j, k)];
        for (int i = 0; i < e_.nr; ++i) row[i] = x[m++];
      }
  }

  void store_interior(std::span<double> x) const {
    if (x.size() != e_.size()) throw DimensionError("store_interior: size mismatch");
    std::size_t m = 0;
    for (int k = 0; k < e_.np; ++k)
      for (int j = 0; j < e_.nt; ++j) {
        const double* row = &data_[offset(0, j, k)];
        for (int i = 0; i < e_.nr; ++i) x[m++] = row[i];
      }
  }

 private:
  Extent3 e_{};
  std::size_t sr_ = 1, st_ = 0, sp_ = 0;
  std::vector<double> data_;
};

/// Copies the block's cells out of a global natural-order vector.
std::vector<double> scatter(std::span<const double> global, const Extent3& dims, const Block& b);

/// Writes a block-local vector into its place in a global natural-order vector.
void gather(std::span<const double> local, const Block& b, const Extent3& dims,
            std::span<double> global);

}  // namespace pfcg
