#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pfcg/layout.hpp"

namespace pfcg {

/// Diagonal-format sparse matrix.
///
/// bands[d][m] is the coefficient of column m + offsets[d] in row m. Entries
/// whose column falls outside [0, n) are kept at exactly 0. When
/// `stencil` is set the matrix is a 7-point operator over that box and
/// positions whose neighbor lies outside the box (row wrap-around) are also
/// outside the structural pattern and held at 0.
struct DiaMatrix {
  int n = 0;
  std::vector<std::int64_t> offsets;
  std::vector<std::vector<double>> bands;
  std::optional<Extent3> stencil;

  DiaMatrix() = default;
  DiaMatrix(int n_, std::vector<std::int64_t> offsets_);

  /// Empty 7-point matrix over `shape`, offsets
  /// [-nr*nt, -nr, -1, 0, +1, +nr, +nr*nt].
  static DiaMatrix seven_point(const Extent3& shape);

  std::size_t num_bands() const { return offsets.size(); }
  /// Index of the main diagonal band.
  std::size_t main_band() const;
  /// True when (row, row + offsets[d]) belongs to the structural pattern.
  bool in_pattern(int row, std::size_t d) const;
};

/// Compressed sparse row matrix with sorted column indices.
struct CsrMatrix {
  int n = 0;
  std::vector<int> row_ptr{0};
  std::vector<int> col_idx;
  std::vector<double> values;

  std::size_t nnz() const { return values.size(); }
};

/// Zero-fill ILU factors stored on the source pattern: strict lower part
/// holds L (unit diagonal implied), the rest holds U. `inv_udiag` removes the
/// divisions from the backward sweep.
struct LuCsr {
  CsrMatrix pattern;
  std::vector<double> lu_values;
  std::vector<double> inv_udiag;
  std::vector<int> diag_pos;
};

/// Row-major dense matrix, used for oracles and diagnostics.
struct DenseMatrix {
  int n = 0;
  std::vector<double> a;

  explicit DenseMatrix(int n_ = 0)
      : n(n_), a(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

inline constexpr double kIluPivotFloor = 1e-300;
inline constexpr int kDenseCap = 4096;

void spmv_dia(const DiaMatrix& a, std::span<const double> x, std::span<double> y);
std::vector<double> spmv_dia(const DiaMatrix& a, std::span<const double> x);

void spmv_csr(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
std::vector<double> spmv_csr(const CsrMatrix& a, std::span<const double> x);

/// Converts keeping every structural position (zeros included), so the
/// pattern is the fixed 7-point one regardless of coefficient values.
CsrMatrix dia_to_csr(const DiaMatrix& a);

/// Row-wise (IKJ) incomplete LU restricted to the pattern of `a`.
/// Throws IluBreakdown when a pivot magnitude drops below kIluPivotFloor.
LuCsr ilu0(const CsrMatrix& a);

/// z = U^{-1} L^{-1} r by sequential forward then backward substitution.
/// `z` may alias `r`.
void lusolve(const LuCsr& lu, std::span<const double> r, std::span<double> z);
std::vector<double> lusolve(const LuCsr& lu, std::span<const double> r);

DenseMatrix dense_of(const DiaMatrix& a, int cap = kDenseCap);
DenseMatrix dense_of(const CsrMatrix& a, int cap = kDenseCap);

}  // namespace pfcg
