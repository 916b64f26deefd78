#include "pfcg/pcg.hpp"

#include <cmath>
#include <string>

#include "pfcg/errors.hpp"

namespace pfcg {

double Timers::category_sum() const {
  double s = 0.0;
  for (std::size_t t = 0; t < kNumTimers; ++t)
    if (t != static_cast<std::size_t>(Timer::Total)) s += s_[t];
  return s;
}

void SolveConfig::validate() const {
  if (!(tol > 0.0 && tol < 1.0)) throw ConfigError("tolerance must be in (0, 1)");
  if (max_iter && *max_iter < 1) throw ConfigError("max_iter must be >= 1");
}

void local_reduce(std::span<double>) {}

namespace {

double local_dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t m = 0; m < x.size(); ++m) s += x[m] * y[m];
  return s;
}

// Runs op and books its time under `cat`, minus any halo time it reported.
void timed_apply(const LinearMap& op, std::span<const double> in, std::span<double> out,
                 Timers& timers, Timer cat) {
  const double halo_before = timers[Timer::Halo];
  ScopedTimer clock(nullptr, cat);
  op(in, out, timers);
  timers[cat] += clock.elapsed() - (timers[Timer::Halo] - halo_before);
}

}  // namespace

double dot(std::span<const double> x, std::span<const double> y, const Reducer& reduce) {
  double s = local_dot(x, y);
  reduce(std::span<double>(&s, 1));
  return s;
}

SolveStats pcg(const LinearMap& apply_a, const LinearMap& apply_m, std::span<const double> b,
               std::span<double> x, const SolveConfig& cfg, const Reducer& reduce) {
  cfg.validate();
  const std::size_t n = b.size();
  if (x.size() != n) throw DimensionError("pcg: x and b lengths differ");
  const long max_iter = cfg.max_iter.value_or(10 * static_cast<long>(n));

  SolveStats st;
  Timers& tm = st.timers;
  const ScopedTimer total(nullptr, Timer::Total);

  std::vector<double> r(n), z(n), p(n), ap(n);

  timed_apply(apply_a, x, ap, tm, Timer::Matvec);
  {
    ScopedTimer t(&tm, Timer::VectorOps);
    for (std::size_t m = 0; m < n; ++m) r[m] = b[m] - ap[m];
  }

  double norms[2];
  {
    ScopedTimer t(&tm, Timer::DotAllreduce);
    norms[0] = local_dot(b, b);
    norms[1] = local_dot(r, r);
    reduce(norms);
  }
  const double bnorm = std::sqrt(norms[0]);
  const double r0norm = std::sqrt(norms[1]);
  if (bnorm == 0.0 && r0norm == 0.0) {
    st.converged = true;
    st.residual_history.push_back(0.0);
    tm[Timer::Total] = total.elapsed();
    return st;
  }
  const double denom = bnorm > 0.0 ? bnorm : r0norm;
  double rel = r0norm / denom;
  st.residual_history.push_back(rel);

  if (rel > cfg.tol) {
    timed_apply(apply_m, r, z, tm, Timer::Precond);
    double rz;
    {
      ScopedTimer t(&tm, Timer::DotAllreduce);
      rz = dot(r, z, reduce);
    }
    {
      ScopedTimer t(&tm, Timer::VectorOps);
      std::copy(z.begin(), z.end(), p.begin());
    }

    while (st.iterations < max_iter) {
      timed_apply(apply_a, p, ap, tm, Timer::Matvec);
      double pap;
      {
        ScopedTimer t(&tm, Timer::DotAllreduce);
        pap = dot(p, ap, reduce);
      }
      if (!(pap > 0.0))
        throw IndefiniteError("pcg: <p, Ap> = " + std::to_string(pap) + " at iteration " +
                              std::to_string(st.iterations));
      const double alpha = rz / pap;
      {
        ScopedTimer t(&tm, Timer::VectorOps);
        for (std::size_t m = 0; m < n; ++m) {
          x[m] += alpha * p[m];
          r[m] -= alpha * ap[m];
        }
      }
      ++st.iterations;

      timed_apply(apply_m, r, z, tm, Timer::Precond);
      double sums[2];
      {
        ScopedTimer t(&tm, Timer::DotAllreduce);
        sums[0] = local_dot(r, r);
        sums[1] = local_dot(r, z);
        reduce(sums);
      }
      rel = std::sqrt(sums[0]) / denom;
      st.residual_history.push_back(rel);
      if (rel <= cfg.tol) break;

      const double beta = sums[1] / rz;
      rz = sums[1];
      {
        ScopedTimer t(&tm, Timer::VectorOps);
        for (std::size_t m = 0; m < n; ++m) p[m] = z[m] + beta * p[m];
      }
    }
  }
  st.converged = rel <= cfg.tol;

  timed_apply(apply_a, x, ap, tm, Timer::Matvec);
  {
    ScopedTimer t(&tm, Timer::VectorOps);
    for (std::size_t m = 0; m < n; ++m) r[m] = b[m] - ap[m];
  }
  {
    ScopedTimer t(&tm, Timer::DotAllreduce);
    st.true_residual = std::sqrt(dot(r, r, reduce)) / denom;
  }
  tm[Timer::Total] = total.elapsed();
  return st;
}

}  // namespace pfcg
