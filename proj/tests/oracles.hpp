// Reference implementations used only by tests. Each one is written
// independently of the library code it checks: plain dense loops, no shared
// helpers.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "pfcg/laplace.hpp"
#include "pfcg/sparse.hpp"

namespace oracle {

using pfcg::DenseMatrix;

inline std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x) {
  std::vector<double> y(static_cast<std::size_t>(a.n), 0.0);
  for (int i = 0; i < a.n; ++i) {
    double s = 0.0;
    for (int j = 0; j < a.n; ++j) s += a(i, j) * x[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(i)] = s;
  }
  return y;
}

/// Gaussian elimination with partial pivoting.
inline std::vector<double> solve(DenseMatrix a, std::vector<double> b) {
  const int n = a.n;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    if (a(piv, c) == 0.0) throw std::runtime_error("oracle::solve: singular");
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(a(c, j), a(piv, j));
      std::swap(b[static_cast<std::size_t>(c)], b[static_cast<std::size_t>(piv)]);
    }
    for (int r = c + 1; r < n; ++r) {
      const double f = a(r, c) / a(c, c);
      if (f == 0.0) continue;
      for (int j = c; j < n; ++j) a(r, j) -= f * a(c, j);
      b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(c)];
    }
  }
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int r = n - 1; r >= 0; --r) {
    double s = b[static_cast<std::size_t>(r)];
    for (int j = r + 1; j < n; ++j) s -= a(r, j) * x[static_cast<std::size_t>(j)];
    x[static_cast<std::size_t>(r)] = s / a(r, r);
  }
  return x;
}

/// Zero-fill ILU on a dense array: entries outside `mask` are never touched.
/// Returns L (strict lower, unit diagonal implied) and U packed together.
inline DenseMatrix dense_pattern_ilu0(DenseMatrix a, const std::vector<bool>& mask) {
  const int n = a.n;
  auto in = [&](int i, int j) { return mask[static_cast<std::size_t>(i) * n + j]; };
  for (int i = 1; i < n; ++i)
    for (int k = 0; k < i; ++k) {
      if (!in(i, k)) continue;
      a(i, k) /= a(k, k);
      for (int j = k + 1; j < n; ++j)
        if (in(i, j)) a(i, j) -= a(i, k) * a(k, j);
    }
  return a;
}

/// Multiplies the packed unit-lower and upper factors.
inline DenseMatrix lu_product(const DenseMatrix& lu) {
  const int n = lu.n;
  DenseMatrix p(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k <= std::min(i, j); ++k) {
        const double l = k == i ? 1.0 : lu(i, k);
        s += l * lu(k, j);
      }
      p(i, j) = s;
    }
  return p;
}

/// B^T B + n I with B uniform in [-1, 1].
inline DenseMatrix random_spd(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DenseMatrix b(n);
  for (double& v : b.a) v = u(rng);
  DenseMatrix a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += b(k, i) * b(k, j);
      a(i, j) = s + (i == j ? n : 0.0);
    }
  return a;
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

/// Random 7-point DIA matrix over `shape`. Off-diagonals are uniform in
/// [-1, 1]; with `dominant` the diagonal exceeds the row's absolute sum.
/// Out-of-box positions stay zero.
inline pfcg::DiaMatrix random_seven_band(const pfcg::Extent3& shape, std::mt19937_64& rng,
                                         bool dominant) {
  auto a = pfcg::DiaMatrix::seven_point(shape);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t md = a.main_band();
  for (int m = 0; m < a.n; ++m) {
    double off = 0.0;
    for (std::size_t d = 0; d < a.num_bands(); ++d) {
      if (d == md || !a.in_pattern(m, d)) continue;
      const double v = u(rng);
      a.bands[d][static_cast<std::size_t>(m)] = v;
      off += std::abs(v);
    }
    a.bands[md][static_cast<std::size_t>(m)] = dominant ? off + 1.0 + std::abs(u(rng)) : u(rng);
  }
  return a;
}

/// Fixed-order binary tree sum: the left part is the largest power of two
/// strictly below n, summed recursively.
inline double rank_ordered_tree_sum(std::span<const double> v) {
  if (v.empty()) return 0.0;
  if (v.size() == 1) return v[0];
  const std::size_t left = std::bit_floor(v.size() - 1);
  return rank_ordered_tree_sum(v.first(left)) + rank_ordered_tree_sum(v.subspan(left));
}

/// Full operator including the matrix-free couplings, column by column.
inline DenseMatrix materialize(pfcg::LaplaceOperator& op) {
  const int n = static_cast<int>(op.size());
  DenseMatrix a(n);
  std::vector<double> e(static_cast<std::size_t>(n), 0.0), y(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    e[static_cast<std::size_t>(c)] = 1.0;
    op.apply(e, y);
    e[static_cast<std::size_t>(c)] = 0.0;
    for (int r = 0; r < n; ++r) a(r, c) = y[static_cast<std::size_t>(r)];
  }
  return a;
}

inline double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (double v : a.a) m = std::max(m, std::abs(v));
  return m;
}

inline double asymmetry(const DenseMatrix& a) {
  double m = 0.0;
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < i; ++j) m = std::max(m, std::abs(a(i, j) - a(j, i)));
  return m;
}

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double rel_diff(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

inline double max_rel_diff(std::span<const double> a, std::span<const double> b) {
  double scale = 0.0, m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max(scale, std::abs(b[i]));
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return scale == 0.0 ? m : m / scale;
}

}  // namespace oracle
