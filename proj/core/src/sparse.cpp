#include "pfcg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pfcg {

DiaMatrix::DiaMatrix(int n_, std::vector<std::int64_t> offsets_)
    : n(n_), offsets(std::move(offsets_)) {
  if (n < 0) throw DimensionError("DiaMatrix: negative dimension");
  for (std::size_t d = 1; d < offsets.size(); ++d)
    if (offsets[d] <= offsets[d - 1])
      throw DimensionError("DiaMatrix: offsets must be strictly increasing");
  bands.assign(offsets.size(), std::vector<double>(static_cast<std::size_t>(n), 0.0));
}

DiaMatrix DiaMatrix::seven_point(const Extent3& s) {
  const std::int64_t sr = 1, st = s.nr, sp = static_cast<std::int64_t>(s.nr) * s.nt;
  // Degenerate shapes (an axis of length 1) would collide offsets.
  if (s.nr < 2 || s.nt < 2 || s.np < 2)
    throw DimensionError("seven_point: every axis needs at least 2 cells");
  DiaMatrix a(static_cast<int>(s.size()), {-sp, -st, -sr, 0, sr, st, sp});
  a.stencil = s;
  return a;
}

std::size_t DiaMatrix::main_band() const {
  auto it = std::find(offsets.begin(), offsets.end(), 0);
  if (it == offsets.end()) throw DimensionError("DiaMatrix: no main diagonal");
  return static_cast<std::size_t>(it - offsets.begin());
}

bool DiaMatrix::in_pattern(int row, std::size_t d) const {
  const std::int64_t col = row + offsets[d];
  if (col < 0 || col >= n) return false;
  if (!stencil) return true;
  const Extent3& s = *stencil;
  const int i = row % s.nr;
  const int j = (row / s.nr) % s.nt;
  const int k = row / (s.nr * s.nt);
  switch (d) {
    case 0: return k > 0;
    case 1: return j > 0;
    case 2: return i > 0;
    case 3: return true;
    case 4: return i + 1 < s.nr;
    case 5: return j + 1 < s.nt;
    case 6: return k + 1 < s.np;
    default: return false;
  }
}

void spmv_dia(const DiaMatrix& a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = static_cast<std::size_t>(a.n);
  if (x.size() != n || y.size() != n) throw DimensionError("spmv_dia: length mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t d = 0; d < a.num_bands(); ++d) {
    const std::int64_t off = a.offsets[d];
    const std::int64_t lo = std::max<std::int64_t>(0, -off);
    const std::int64_t hi = std::min<std::int64_t>(a.n, a.n - off);
    const double* band = a.bands[d].data();
    for (std::int64_t m = lo; m < hi; ++m) y[m] += band[m] * x[m + off];
  }
}

std::vector<double> spmv_dia(const DiaMatrix& a, std::span<const double> x) {
  std::vector<double> y(static_cast<std::size_t>(a.n));
  spmv_dia(a, x, y);
  return y;
}

void spmv_csr(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = static_cast<std::size_t>(a.n);
  if (x.size() != n || y.size() != n) throw DimensionError("spmv_csr: length mismatch");
  for (int m = 0; m < a.n; ++m) {
    double s = 0.0;
    for (int p = a.row_ptr[m]; p < a.row_ptr[m + 1]; ++p) s += a.values[p] * x[a.col_idx[p]];
    y[m] = s;
  }
}

std::vector<double> spmv_csr(const CsrMatrix& a, std::span<const double> x) {
  std::vector<double> y(static_cast<std::size_t>(a.n));
  spmv_csr(a, x, y);
  return y;
}

CsrMatrix dia_to_csr(const DiaMatrix& a) {
  CsrMatrix c;
  c.n = a.n;
  c.row_ptr.assign(static_cast<std::size_t>(a.n) + 1, 0);
  c.col_idx.reserve(static_cast<std::size_t>(a.n) * a.num_bands());
  c.values.reserve(static_cast<std::size_t>(a.n) * a.num_bands());
  // Offsets are increasing, so columns come out sorted.
  for (int m = 0; m < a.n; ++m) {
    for (std::size_t d = 0; d < a.num_bands(); ++d) {
      if (!a.in_pattern(m, d)) continue;
      c.col_idx.push_back(static_cast<int>(m + a.offsets[d]));
      c.values.push_back(a.bands[d][m]);
    }
    c.row_ptr[m + 1] = static_cast<int>(c.values.size());
  }
  return c;
}

LuCsr ilu0(const CsrMatrix& a) {
  const int n = a.n;
  LuCsr lu;
  lu.pattern = a;
  lu.lu_values = a.values;
  lu.diag_pos.assign(static_cast<std::size_t>(n), -1);
  lu.inv_udiag.assign(static_cast<std::size_t>(n), 0.0);

  for (int i = 0; i < n; ++i)
    for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
      if (a.col_idx[p] == i) lu.diag_pos[i] = p;
  for (int i = 0; i < n; ++i)
    if (lu.diag_pos[i] < 0) throw DimensionError("ilu0: row " + std::to_string(i) + " has no diagonal");

  std::vector<double>& v = lu.lu_values;
  std::vector<int> where(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    const int begin = a.row_ptr[i], end = a.row_ptr[i + 1];
    for (int p = begin; p < end; ++p) where[a.col_idx[p]] = p;

    for (int p = begin; p < end && a.col_idx[p] < i; ++p) {
      const int k = a.col_idx[p];
      const double lik = v[p] * lu.inv_udiag[k];
      v[p] = lik;
      for (int q = lu.diag_pos[k] + 1; q < a.row_ptr[k + 1]; ++q) {
        const int w = where[a.col_idx[q]];
        if (w >= 0) v[w] -= lik * v[q];
      }
    }

    const double pivot = v[lu.diag_pos[i]];
    if (!(std::abs(pivot) >= kIluPivotFloor)) throw IluBreakdown(i, pivot);
    lu.inv_udiag[i] = 1.0 / pivot;

    for (int p = begin; p < end; ++p) where[a.col_idx[p]] = -1;
  }
  return lu;
}

void lusolve(const LuCsr& lu, std::span<const double> r, std::span<double> z) {
  const CsrMatrix& s = lu.pattern;
  const std::size_t n = static_cast<std::size_t>(s.n);
  if (r.size() != n || z.size() != n) throw DimensionError("lusolve: length mismatch");
  const double* v = lu.lu_values.data();
  for (int i = 0; i < s.n; ++i) {
    double acc = r[i];
    for (int p = s.row_ptr[i]; p < lu.diag_pos[i]; ++p) acc -= v[p] * z[s.col_idx[p]];
    z[i] = acc;
  }
  for (int i = s.n - 1; i >= 0; --i) {
    double acc = z[i];
    for (int p = lu.diag_pos[i] + 1; p < s.row_ptr[i + 1]; ++p) acc -= v[p] * z[s.col_idx[p]];
    z[i] = acc * lu.inv_udiag[i];
  }
}

std::vector<double> lusolve(const LuCsr& lu, std::span<const double> r) {
  std::vector<double> z(r.begin(), r.end());
  lusolve(lu, z, z);
  return z;
}

DenseMatrix dense_of(const DiaMatrix& a, int cap) {
  if (a.n > cap) throw RefusalError("dense_of: dimension exceeds cap");
  DenseMatrix d(a.n);
  for (int m = 0; m < a.n; ++m)
    for (std::size_t b = 0; b < a.num_bands(); ++b) {
      const std::int64_t col = m + a.offsets[b];
      if (col >= 0 && col < a.n) d(m, static_cast<int>(col)) += a.bands[b][m];
    }
  return d;
}

DenseMatrix dense_of(const CsrMatrix& a, int cap) {
  if (a.n > cap) throw RefusalError("dense_of: dimension exceeds cap");
  DenseMatrix d(a.n);
  for (int m = 0; m < a.n; ++m)
    for (int p = a.row_ptr[m]; p < a.row_ptr[m + 1]; ++p) d(m, a.col_idx[p]) += a.values[p];
  return d;
}

}  // namespace pfcg
