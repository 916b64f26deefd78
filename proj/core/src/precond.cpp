#include "pfcg/precond.hpp"

#include <cmath>
#include <string>

#include "pfcg/laplace.hpp"

namespace pfcg {

DiagPC build_pc1(const DiaMatrix& a) {
  const auto& d = a.bands[a.main_band()];
  DiagPC pc;
  pc.inv_diag.resize(d.size());
  for (std::size_t m = 0; m < d.size(); ++m) {
    if (d[m] == 0.0 || !std::isfinite(d[m]))
      throw AssemblyError("build_pc1: zero or non-finite diagonal at row " + std::to_string(m));
    pc.inv_diag[m] = 1.0 / d[m];
  }
  return pc;
}

DiagPC build_pc1(const LaplaceOperator& op) { return build_pc1(op.matrix()); }

void apply_pc1(const DiagPC& pc, std::span<const double> r, std::span<double> z) {
  if (r.size() != pc.inv_diag.size() || z.size() != r.size())
    throw DimensionError("apply_pc1: length mismatch");
  for (std::size_t m = 0; m < r.size(); ++m) z[m] = pc.inv_diag[m] * r[m];
}

IluPC build_pc2(const CsrMatrix& local_a) { return IluPC{ilu0(local_a)}; }

IluPC build_pc2(const LaplaceOperator& op) { return build_pc2(dia_to_csr(op.matrix())); }

void apply_pc2(const IluPC& pc, std::span<const double> r, std::span<double> z) {
  lusolve(pc.lu, r, z);
}

LinearMap as_linear_map(const DiagPC& pc) {
  return [&pc](std::span<const double> r, std::span<double> z, Timers&) { apply_pc1(pc, r, z); };
}

LinearMap as_linear_map(const IluPC& pc) {
  return [&pc](std::span<const double> r, std::span<double> z, Timers&) { apply_pc2(pc, r, z); };
}

}  // namespace pfcg
