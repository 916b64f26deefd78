#pragma once

#include <array>
#include <chrono>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace pfcg {

/// Timer categories, following the PCG operation taxonomy.
enum class Timer { Matvec, Precond, DotAllreduce, VectorOps, Halo, Setup, Total };
inline constexpr std::size_t kNumTimers = 7;
inline constexpr std::array<std::string_view, kNumTimers> kTimerNames = {
    "matvec", "precond", "dot_allreduce", "vector_ops", "halo", "setup", "total"};

class Timers {
 public:
  double& operator[](Timer t) { return s_[static_cast<std::size_t>(t)]; }
  double operator[](Timer t) const { return s_[static_cast<std::size_t>(t)]; }
  const std::array<double, kNumTimers>& seconds() const { return s_; }
  /// Sum of every category except Total.
  double category_sum() const;

 private:
  std::array<double, kNumTimers> s_{};
};

/// Adds the lifetime of the guard to one timer category.
class ScopedTimer {
 public:
  ScopedTimer(Timers* timers, Timer t)
      : timers_(timers), t_(t), start_(std::chrono::steady_clock::now()) {}
  ScopedTimer(const ScopedTimer&) = delete;
  ScopedTimer& operator=(const ScopedTimer&) = delete;
  ~ScopedTimer() {
    if (timers_) (*timers_)[t_] += elapsed();
  }
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  Timers* timers_;
  Timer t_;
  std::chrono::steady_clock::time_point start_;
};

enum class PcKind { Diagonal = 1, Ilu0 = 2 };

struct SolveConfig {
  double tol = 1e-9;
  /// Defaults to 10 n when unset.
  std::optional<long> max_iter;
  PcKind pc = PcKind::Diagonal;

  void validate() const;
};

struct SolveStats {
  long iterations = 0;
  std::vector<double> residual_history;
  Timers timers;
  bool converged = false;
  /// ||b - A x|| / denominator, recomputed once after the loop.
  double true_residual = 0.0;
  /// PC2 was requested but ILU0 broke down, so PC1 was used.
  bool pc_fallback = false;

  double final_residual() const {
    return residual_history.empty() ? 0.0 : residual_history.back();
  }
};

/// y = Op x. Implementations may charge halo time to the supplied timers;
/// pcg subtracts it from the enclosing matvec/precond measurement.
using LinearMap =
    std::function<void(std::span<const double> x, std::span<double> y, Timers& timers)>;

/// In-place collective sum over all workers of each entry.
using Reducer = std::function<void(std::span<double> values)>;

/// Reducer for a single worker.
void local_reduce(std::span<double>);

/// Local partial dot product followed by the collective sum.
double dot(std::span<const double> x, std::span<const double> y, const Reducer& reduce = local_reduce);

/// Preconditioned conjugate gradients. `x` holds x0 on entry and the
/// solution on exit. Stops when ||r|| <= tol ||b|| (or tol ||r0|| if b = 0).
/// Exceeding max_iter returns converged = false; <p, Ap> <= 0 throws
/// IndefiniteError.
SolveStats pcg(const LinearMap& apply_a, const LinearMap& apply_m, std::span<const double> b,
               std::span<double> x, const SolveConfig& cfg, const Reducer& reduce = local_reduce);

}  // namespace pfcg
