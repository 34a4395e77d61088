#include "tscope/potential.hpp"
#include "tscope/radial.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

using namespace tscope;

namespace {

// Second-order finite-difference Laplacian of a sampled function at interior point p.
template <class F>
double fd_laplacian(const F& f, const Point3& x, double h) {
  double s = -6.0 * f(x);
  for (int a = 0; a < 3; ++a)
    for (int sg : {-1, 1}) {
      Point3 y = x;
      y[a] += sg * h;
      s += f(y);
    }
  return s / (h * h);
}

}  // namespace

TEST(Grid, CellSelfIntegralMatchesClosedForm) {
  const double closed = (3.0 * std::log(2.0 + std::sqrt(3.0)) - pi / 2.0) / (4.0 * pi);
  EXPECT_NEAR(cell_self_integral(), closed, 1e-13);
  EXPECT_NEAR(4.0 * pi * cell_self_integral(), 2.380077363979553, 1e-12);
}

TEST(Grid, BuildRejectsBadInput) {
  EXPECT_THROW(build_grid(3, 1.0), std::invalid_argument);
  EXPECT_THROW(build_grid(8, 0.0), std::invalid_argument);
  EXPECT_THROW(build_grid(8, -1.0), std::invalid_argument);
}

TEST(Grid, IndexingAndMirror) {
  const Grid3 g = build_grid(6, 2.0);
  EXPECT_DOUBLE_EQ(g.h(), 2.0 / 3.0);
  EXPECT_EQ(g.size(), 216);
  for (Index p = 0; p < g.size(); ++p) {
    const auto x = g.point(p), y = g.point(g.mirror(p));
    for (int a = 0; a < 3; ++a) EXPECT_NEAR(x[a], -y[a], 1e-14);
    EXPECT_EQ(g.mirror(g.mirror(p)), p);
  }
  EXPECT_EQ(g.index(1, 2, 3), (1 * 6 + 2) * 6 + 3);
  EXPECT_NEAR(g.coord(0), -2.0 + g.h() / 2, 1e-15);
}

TEST(Grid, GridFunctionRejectsNonFinite) {
  const Grid3 g = build_grid(4, 1.0);
  CVector v = CVector::Zero(g.size());
  v[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(GridFunction(g, v), std::invalid_argument);
  EXPECT_THROW(GridFunction(g, CVector::Zero(5)), std::invalid_argument);
}

TEST(Grid, KernelDiagonalRules) {
  const Grid3 g = build_grid(4, 1.0);
  EXPECT_DOUBLE_EQ(gj_entry(g, 1, 0.0, true), g.weight() / (4 * pi));
  EXPECT_DOUBLE_EQ(gj_entry(g, 2, 0.0, true), 0.0);
  EXPECT_DOUBLE_EQ(gj_entry(g, 3, 0.0, true), 0.0);
  EXPECT_DOUBLE_EQ(gj_entry(g, 0, 0.0, true), g.h() * g.h() * cell_self_integral());
  const cplx d = resolvent_entry(g, 0.3, 0.0, true);
  EXPECT_DOUBLE_EQ(d.real(), g.h() * g.h() * cell_self_integral());
  EXPECT_DOUBLE_EQ(d.imag(), 0.3 * g.weight() / (4 * pi));
  EXPECT_THROW(gj_entry(g, 4, 1.0, false), std::invalid_argument);
}

TEST(Grid, KernelsSymmetric) {
  const Grid3 g = build_grid(4, 1.0);
  for (int j = 0; j <= 3; ++j) {
    const auto k = build_gj_kernel(g, j);
    EXPECT_LT((k.entries - k.entries.transpose()).norm(), 1e-15);
  }
  const auto r = build_free_resolvent_plus(g, 0.7);
  EXPECT_LT((r.entries - r.entries.transpose()).norm(), 1e-15);
}

TEST(Grid, ResolventMatchesGjSeriesAtSmallLambda) {
  const Grid3 g = build_grid(4, 1.0);
  const auto idx = all_indices(g);
  for (double l : {1e-1, 5e-2}) {
    const CMatrix R = resolvent_block(g, l, idx, idx);
    CMatrix S = CMatrix::Zero(g.size(), g.size());
    cplx f = 1.0;
    for (int j = 0; j <= 3; ++j) {
      S += f * gj_block(g, j, idx, idx).cast<cplx>();
      f *= cplx(0.0, l);
    }
    // Remainder is O(lambda^4) times the largest r^3 / 4! entries.
    EXPECT_LT((R - S).cwiseAbs().maxCoeff(), 2.0 * std::pow(l, 4) * g.weight() * std::pow(2 * std::sqrt(3.0), 3) / 24);
  }
}

TEST(Grid, OutgoingKernelSolvesHelmholtzAwayFromSource) {
  const double lambda = 0.8;
  auto k = [&](const Point3& x) { return std::cos(lambda * std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])) /
                                          (4 * pi * std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); };
  const Point3 x{1.3, -0.4, 0.9};
  double prev = 0.0;
  for (double h : {0.1, 0.05}) {
    const double res = std::abs(fd_laplacian(k, x, h) + lambda * lambda * k(x));
    if (prev > 0) EXPECT_NEAR(prev / res, 4.0, 0.3);
    prev = res;
  }
}

TEST(Grid, WorkerCountHonoursEnvironmentCap) {
  setenv("THRESHOLD_SCOPE_THREADS", "1", 1);
  EXPECT_EQ(worker_count(), 1);
  unsetenv("THRESHOLD_SCOPE_THREADS");
  EXPECT_GE(worker_count(), 1);
}

TEST(Potential, SplitPointExamples) {
  const Grid3 g = build_grid(4, 1.0);
  RVector V = RVector::Zero(g.size());
  V[0] = 4.0;
  V[1] = -9.0;
  const PotentialSplit s = split_samples(g, V);
  EXPECT_EQ(s.U[0], 1.0);
  EXPECT_EQ(s.v[0], 2.0);
  EXPECT_EQ(s.w[0], 2.0);
  EXPECT_EQ(s.U[1], -1.0);
  EXPECT_EQ(s.v[1], 3.0);
  EXPECT_EQ(s.w[1], -3.0);
  EXPECT_EQ(s.U[2], 1.0);
  EXPECT_EQ(s.v[2], 0.0);
  EXPECT_EQ(s.w[2], 0.0);
  EXPECT_EQ(s.support.size(), 2u);
  EXPECT_DOUBLE_EQ(s.alpha, 13.0 * g.weight());
  V[5] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(split_samples(g, V), std::invalid_argument);
}

TEST(Potential, SplitRoundTripToRounding) {
  const Grid3 g = build_grid(12, 3.0);
  const PotentialSplit s = split_potential(Potential::resonant(2.0), g);
  for (Index p = 0; p < g.size(); ++p) {
    if (s.V[p] == 0.0) continue;
    EXPECT_NEAR(s.U[p] * s.v[p] * s.v[p], s.V[p], 4e-16 * std::abs(s.V[p]));
    EXPECT_NEAR(s.w[p] * s.v[p], s.V[p], 4e-16 * std::abs(s.V[p]));
  }
}

TEST(Potential, FactoriesVanishOutsideSupportAndAreEven) {
  for (const Potential& V : {Potential::resonant(2.0), Potential::eigen(2.5), Potential::square_well(1.0, 1.0)}) {
    const double R = V.support_radius();
    EXPECT_EQ(V.value(R), 0.0);
    EXPECT_EQ(V.value(1.5 * R), 0.0);
    const Grid3 g = build_grid(12, 3.0);
    const RVector s = V.sample(g);
    for (Index p = 0; p < g.size(); ++p) EXPECT_EQ(s[p], s[g.mirror(p)]);
  }
  EXPECT_THROW(Potential::resonant(2.0).sample(build_grid(8, 2.0)), std::invalid_argument);
  EXPECT_THROW(Potential::resonant(-1.0), std::invalid_argument);
  EXPECT_THROW(Potential::eigen(2.0, "cubic"), std::invalid_argument);
}

TEST(Potential, L1PreservingSampling) {
  const Potential W = Potential::square_well(2.0, 1.0);
  const Grid3 g = build_grid(12, 3.0);
  const RVector s = W.sample(g);
  EXPECT_NEAR(g.weight() * s.cwiseAbs().sum(), W.l1_norm(), 1e-12);
  EXPECT_NEAR(W.l1_norm(), 2.0 * 4.0 / 3.0 * pi, 1e-10);
}

TEST(Potential, QuinticBlendMatchesEndData) {
  const QuinticBlend q(1.0, 2.0, {1.0, 2.0, 3.0}, {-1.0, 0.5, 4.0});
  const auto a = q(1.0), b = q(2.0);
  EXPECT_NEAR(a[0], 1.0, 1e-14);
  EXPECT_NEAR(a[1], 2.0, 1e-13);
  EXPECT_NEAR(a[2], 3.0, 1e-12);
  EXPECT_NEAR(b[0], -1.0, 1e-13);
  EXPECT_NEAR(b[1], 0.5, 1e-12);
  EXPECT_NEAR(b[2], 4.0, 1e-11);
}

namespace {

// max |(-Lap + V) g| over grid points with r in [r0, r1], relative to max |V g| there.
double zero_energy_residual(const Potential& V, double r0, double r1, int n_grid) {
  const Grid3 g = build_grid(n_grid, 3.0);
  const CVector sol = V.known_solution(g).values;
  const RVector samples = V.with_sampling(Sampling::point).sample(g);
  double res = 0.0, scale = 0.0;
  const int n = g.n();
  for (int i = 1; i < n - 1; ++i)
    for (int j = 1; j < n - 1; ++j)
      for (int k = 1; k < n - 1; ++k) {
        const Index p = g.index(i, j, k);
        const double r = g.radius(p);
        if (r < r0 || r > r1) continue;
        cplx lap = -6.0 * sol[p];
        lap += sol[g.index(i - 1, j, k)] + sol[g.index(i + 1, j, k)] + sol[g.index(i, j - 1, k)] +
               sol[g.index(i, j + 1, k)] + sol[g.index(i, j, k - 1)] + sol[g.index(i, j, k + 1)];
        lap /= g.h() * g.h();
        res = std::max(res, std::abs(-lap + samples[p] * sol[p]));
        scale = std::max(scale, std::abs(samples[p] * sol[p]));
      }
  return res / scale;
}

}  // namespace

TEST(Potential, ResonantSolutionSolvesZeroEnergyEquation) {
  const double coarse = zero_energy_residual(Potential::resonant(2.0), 1.2, 1.8, 60);
  const double fine = zero_energy_residual(Potential::resonant(2.0), 1.2, 1.8, 120);
  EXPECT_GT(coarse / fine, 3.5) << coarse << " " << fine;
  EXPECT_LT(fine, 0.01);
}

TEST(Potential, EigenSolutionSolvesZeroEnergyEquation) {
  const double coarse = zero_energy_residual(Potential::eigen(2.5), 1.5, 2.25, 60);
  const double fine = zero_energy_residual(Potential::eigen(2.5), 1.5, 2.25, 120);
  EXPECT_GT(coarse / fine, 3.5) << coarse << " " << fine;
  EXPECT_LT(fine, 0.01);
}

TEST(Potential, EigenSolutionIsOrthogonalToV) {
  const Potential V = Potential::eigen(2.5);
  const Grid3 g = build_grid(16, 3.0);
  const PotentialSplit s = split_potential(V, g);
  const CVector sol = V.known_solution(g).values;
  cplx acc = 0.0, mag = 0.0;
  for (Index p = 0; p < g.size(); ++p) {
    acc += s.v[p] * s.w[p] * sol[p];
    mag += std::abs(s.v[p] * s.w[p] * sol[p]);
  }
  EXPECT_LT(std::abs(acc), 1e-12 * std::abs(mag));
}

TEST(Radial, SquareWellCriticalCoupling) {
  const Potential W = Potential::square_well(1.0, 1.0);
  const TuneResult first = tune_coupling(W, 0, 1.0, 4.0);
  EXPECT_NEAR(first.c_star, pi * pi / 4, 1e-6);
  const TuneResult second = tune_coupling(W, 0, 15.0, 30.0);
  EXPECT_NEAR(second.c_star, 9 * pi * pi / 4, 1e-4);
  EXPECT_EQ(shoot_zero_energy(W.with_coupling(second.c_star), 0).node_count, 1);
  EXPECT_THROW(tune_coupling(W, 0, 3.0, 4.0), std::invalid_argument);
}

TEST(Radial, ConstructionsAreCritical) {
  const ShootingResult res = shoot_zero_energy(Potential::resonant(2.0), 0);
  EXPECT_LT(std::abs(res.a), 1e-8 * std::abs(res.b));
  EXPECT_LT(res.step_change, 1e-8);
  const ShootingResult eig = shoot_zero_energy(Potential::eigen(2.5), 1);
  EXPECT_LT(std::abs(eig.a), 1e-8 * std::abs(eig.b));
  EXPECT_NEAR(tune_coupling(Potential::eigen(2.5), 1, 0.8, 1.2).c_star, 1.0, 1e-5);
}
