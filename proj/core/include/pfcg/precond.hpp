#pragma once

#include <span>
#include <vector>

#include "pfcg/pcg.hpp"
#include "pfcg/sparse.hpp"

namespace pfcg {

class LaplaceOperator;

/// PC1: point-Jacobi scaling by the inverse diagonal.
struct DiagPC {
  std::vector<double> inv_diag;
};

/// PC2: ILU0 of the worker-local block, cross-block couplings dropped.
struct IluPC {
  LuCsr lu;
};

DiagPC build_pc1(const DiaMatrix& a);
DiagPC build_pc1(const LaplaceOperator& op);
void apply_pc1(const DiagPC& pc, std::span<const double> r, std::span<double> z);

/// Throws IluBreakdown; callers fall back to PC1.
IluPC build_pc2(const CsrMatrix& local_a);
IluPC build_pc2(const LaplaceOperator& op);
void apply_pc2(const IluPC& pc, std::span<const double> r, std::span<double> z);

LinearMap as_linear_map(const DiagPC& pc);
LinearMap as_linear_map(const IluPC& pc);

}  // namespace pfcg
