#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

#include "oracles.hpp"
#include "pfcg/field.hpp"
#include "pfcg/workers.hpp"

using namespace pfcg;

namespace {

std::shared_ptr<const BoundarySpec> uniform_bc(const Grid3D& g, UpperBoundary up, double br) {
  ScalarMap2D m = ScalarMap2D::on_grid(g);
  for (double& v : m.values) v = br;
  return std::make_shared<const BoundarySpec>(BoundarySpec{up, m});
}

}  // namespace

TEST(Gradient, LinearInRadiusIsExact) {
  const Grid3D g = build_mesh({6, 4, 8, 1.0, 2.0});
  const Extent3 d = g.dims();
  GhostedArray phi(d);
  for (int k = -1; k <= d.np; ++k)
    for (int j = -1; j <= d.nt; ++j)
      for (int i = -1; i <= d.nr; ++i) phi(i, j, k) = g.r.center(i);
  const VectorField3D b = gradient(g, phi);
  for (std::size_t m = 0; m < d.size(); ++m) {
    EXPECT_EQ(b.br[m], 1.0);
    EXPECT_EQ(b.bt[m], 0.0);
    EXPECT_EQ(b.bp[m], 0.0);
  }
}

TEST(Gradient, LinearInRadiusThroughBoundaryClosure) {
  // Br = 1 at r0 makes the lower Neumann ghost consistent with Phi = r; the
  // outer layer sees the wall closure instead and is skipped.
  auto g = std::make_shared<const Grid3D>(build_mesh({6, 4, 8, 1.0, 2.0}));
  const Extent3 d = g->dims();
  std::vector<double> phi(d.size());
  for (int k = 0; k < d.np; ++k)
    for (int j = 0; j < d.nt; ++j)
      for (int i = 0; i < d.nr; ++i) phi[interior_index(d, i, j, k)] = g->r.center(i);
  const VectorField3D b =
      field_from_potential(g, uniform_bc(*g, UpperBoundary::ClosedWall, 1.0), phi);
  for (int k = 0; k < d.np; ++k)
    for (int j = 0; j < d.nt; ++j)
      for (int i = 0; i + 1 < d.nr; ++i) {
        const std::size_t m = interior_index(d, i, j, k);
        EXPECT_NEAR(b.br[m], 1.0, 1e-14);
        EXPECT_NEAR(b.bt[m], 0.0, 1e-14);
        EXPECT_EQ(b.bp[m], 0.0);
      }
}

TEST(Gradient, ConstantPotentialHasNoField) {
  auto g = std::make_shared<const Grid3D>(build_mesh({4, 6, 8}));
  std::vector<double> phi(g->dims().size(), 3.25);
  const VectorField3D b =
      field_from_potential(g, uniform_bc(*g, UpperBoundary::ClosedWall, 0.0), phi);
  for (std::size_t m = 0; m < phi.size(); ++m) {
    EXPECT_EQ(b.br[m], 0.0);
    EXPECT_NEAR(b.bt[m], 0.0, 1e-14);
    EXPECT_EQ(b.bp[m], 0.0);
  }
}

TEST(Gradient, Linearity) {
  const Grid3D g = build_mesh({5, 6, 8, 1.0, 2.5, 1.2});
  const Extent3 d = g.dims();
  std::mt19937_64 rng(50);
  GhostedArray p1(d), p2(d), mix(d);
  const double alpha = 1.7, beta = -0.4;
  for (std::size_t q = 0; q < p1.raw().size(); ++q) {
    p1.raw()[q] = oracle::random_vector(1, rng)[0];
    p2.raw()[q] = oracle::random_vector(1, rng)[0];
    mix.raw()[q] = alpha * p1.raw()[q] + beta * p2.raw()[q];
  }
  const VectorField3D a = gradient(g, p1), b = gradient(g, p2), c = gradient(g, mix);
  auto combine = [&](const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> out(x.size());
    for (std::size_t m = 0; m < x.size(); ++m) out[m] = alpha * x[m] + beta * y[m];
    return out;
  };
  EXPECT_LE(oracle::max_rel_diff(c.br, combine(a.br, b.br)), 1e-13);
  EXPECT_LE(oracle::max_rel_diff(c.bt, combine(a.bt, b.bt)), 1e-13);
  EXPECT_LE(oracle::max_rel_diff(c.bp, combine(a.bp, b.bp)), 1e-13);
}

TEST(Gradient, RejectsWrongExtent) {
  const Grid3D g = build_mesh({4, 4, 8});
  EXPECT_THROW(gradient(g, GhostedArray({4, 4, 4})), DimensionError);
}

// Solved dipole potential against the exact field
// B = (f'(r) cos(theta), -f(r) sin(theta) / r, 0), f = a r + b / r^2.
TEST(Gradient, SecondOrderAgainstAnalyticDipole) {
  const double r1 = 2.5;
  const double a = 1.0 / (1.0 + 2.0 * r1 * r1 * r1);
  const double bb = -a * r1 * r1 * r1;
  std::vector<double> err;
  double br0_err = 0.0;
  for (int n : {12, 24, 48}) {
    auto g = std::make_shared<const Grid3D>(build_mesh({n, n, 2 * n, 1.0, r1}));
    ScalarMap2D map = ScalarMap2D::on_grid(*g);
    for (int k = 0; k < map.np; ++k)
      for (int j = 0; j < map.nt; ++j) map.at(j, k) = std::cos(map.theta[j]);
    auto bc = std::make_shared<const BoundarySpec>(BoundarySpec{UpperBoundary::SourceSurface, map});
    SolveConfig cfg{1e-12};
    cfg.pc = PcKind::Ilu0;
    const RunResult res = run_workers(1, {g, bc}, cfg);
    ASSERT_TRUE(res.stats.converged);
    const VectorField3D f = field_from_potential(g, bc, res.x);
    const Extent3 d = g->dims();
    double worst = 0.0;
    for (int k = 0; k < d.np; ++k)
      for (int j = 0; j < d.nt; ++j)
        for (int i = 0; i < d.nr; ++i) {
          const std::size_t m = interior_index(d, i, j, k);
          const double r = g->r.center(i), th = g->t.center(j);
          const double fr = a * r + bb / (r * r), dfr = a - 2.0 * bb / (r * r * r);
          worst = std::max({worst, std::abs(f.br[m] - dfr * std::cos(th)),
                            std::abs(f.bt[m] + fr * std::sin(th) / r), std::abs(f.bp[m])});
          if (i == 0 && n == 48) br0_err = std::max(br0_err, std::abs(f.br[m] - dfr * std::cos(th)));
        }
    err.push_back(worst);
  }
  EXPECT_GE(err[0] / err[1], 3.4);
  EXPECT_GE(err[1] / err[2], 3.4);
  // Innermost Br tracks the cos(theta) data to discretization accuracy.
  EXPECT_LE(br0_err, 2.0 * err[2]);
}
