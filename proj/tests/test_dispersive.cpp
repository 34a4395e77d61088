#include "tscope/cutoff.hpp"
#include "tscope/decay.hpp"
#include "tscope/errors.hpp"
#include "tscope/experiments.hpp"
#include "tscope/lambda_quadrature.hpp"
#include "tscope/spectral.hpp"
#include "tscope/split_step.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <set>

using namespace tscope;
using boost::math::quadrature::gauss_kronrod;

namespace {

const cplx I(0.0, 1.0);

template <class F>
cplx integrate(F f, double a, double b) {
  const double re = gauss_kronrod<double, 61>::integrate([&](double x) { return f(x).real(); }, a, b, 15, 1e-13);
  const double im = gauss_kronrod<double, 61>::integrate([&](double x) { return f(x).imag(); }, a, b, 15, 1e-13);
  return {re, im};
}

const ThresholdData& regular_data() {
  static const ThresholdData td =
      compute_threshold_data(split_potential(subcritical_square_well(reference_grid()), reference_grid()));
  return td;
}

const ThresholdData& resonant_data() {
  static const ThresholdData td =
      compute_threshold_data(split_potential(resonant_well(reference_grid()), reference_grid()));
  return td;
}

std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a * std::pow(b / a, double(i) / (n - 1));
  return out;
}

GridFunction gaussian(const Grid3& g, double sigma, Point3 c = {0.0, 0.0, 0.0}) {
  CVector psi(g.size());
  for (Index p = 0; p < g.size(); ++p) psi[p] = std::exp(-std::pow(distance(g.point(p), c), 2) / (2 * sigma * sigma));
  return GridFunction(g, psi);
}

}  // namespace

TEST(Cutoff, ProfileShape) {
  for (double s : {0.0, 0.2, 0.5, -0.5}) EXPECT_EQ(CutoffSpec::profile(s)[0], 1.0);
  for (double s : {1.0, 1.3, -1.0}) EXPECT_EQ(CutoffSpec::profile(s)[0], 0.0);
  for (double s : {0.55, 0.7, 0.93}) {
    EXPECT_EQ(CutoffSpec::profile(s)[0], CutoffSpec::profile(-s)[0]);
    const double h = 1e-5;
    const auto p = CutoffSpec::profile(s);
    const double d1 = (CutoffSpec::profile(s + h)[0] - CutoffSpec::profile(s - h)[0]) / (2 * h);
    const double d2 = (CutoffSpec::profile(s + h)[1] - CutoffSpec::profile(s - h)[1]) / (2 * h);
    EXPECT_NEAR(p[1], d1, 1e-6 * std::max(1.0, std::abs(d1)));
    EXPECT_NEAR(p[2], d2, 1e-5 * std::max(1.0, std::abs(d2)));
    EXPECT_LT(p[1], 0.0);
  }
  EXPECT_THROW(CutoffSpec(0.0), std::invalid_argument);
}

TEST(Cutoff, FourierTransformMatchesQuadrature) {
  for (double xi : {0.0, 1.0, 3.0, 17.0}) {
    const double ref = 2.0 * gauss_kronrod<double, 61>::integrate(
                                 [&](double s) { return CutoffSpec::profile(s)[0] * std::cos(s * xi); }, 0.0, 1.0, 15,
                                 1e-14);
    EXPECT_NEAR(CutoffSpec::profile_hat(xi), ref, 1e-12);
  }
}

TEST(Chebyshev, ExactOnPolynomials) {
  const auto f = [](double s) {
    CVector v(2);
    v[0] = cplx(s * s * s, s * s);
    v[1] = cplx(std::pow(s, 5) - s, 1.0);
    return v;
  };
  const ChebyshevSeries full = chebyshev_interpolate(f, 16, false);
  const ChebyshevSeries half = chebyshev_interpolate(f, 16, true);
  for (double s : {-0.9, -0.3, 0.0, 0.41, 0.77}) {
    EXPECT_LT((full(s) - f(s)).norm(), 1e-13);
    EXPECT_LT((half(s) - f(s)).norm(), 1e-13);
  }
}

TEST(Chirp, MomentsMatchDirectQuadrature) {
  const CutoffSpec cut(0.5);
  const double t = 40.0;
  const CVector M = chirp_moments(cut, t, 8);
  for (int k = 0; k < 8; ++k) {
    const cplx ref = integrate(
        [&](double l) { return std::exp(I * t * l * l) * cut(l) * std::cos(k * std::acos(l / 0.5)); }, -0.5, 0.5);
    EXPECT_LT(std::abs(M[k] - ref), 1e-10) << k;
  }
  EXPECT_THROW(chirp_moments(cut, 1e9, 8), QuadratureFailure);
}

TEST(Chirp, HOfTRoutesAgreeAndConverge) {
  const CutoffSpec cut(0.1);
  for (double t : {5e3, 2e4, 1e5}) {
    const HofT a = h_lambda_route(cut, t), b = h_u_route(cut, t);
    EXPECT_LT(std::abs(a.value - b.value), 1e-8) << t;
  }
  for (double t : logspace(1.0, 1e10, 11)) EXPECT_LT(std::abs(compute_h_of_t(cut, t).value), 2.0 * std::sqrt(pi));
  EXPECT_LT(std::abs(compute_h_of_t(cut, 1e12).value - h_limit()), 1e-4);
  EXPECT_NEAR(std::abs(h_limit()), std::sqrt(pi), 1e-15);
}

TEST(Chirp, ShiftRemainderBounded) {
  const CutoffSpec cut(0.2);
  const C2Check c = check_c2_bound(cut, logspace(1e2, 1e5, 4), {0.5, 2.0, 8.0});
  // Uniform in t: the ratio does not grow across three decades.
  EXPECT_TRUE(std::isfinite(c.max_ratio));
  EXPECT_LT(c.ratio.row(c.ratio.rows() - 1).maxCoeff(), 1.5 * c.ratio.row(0).maxCoeff());
  const double t = 300.0, a = 3.0;
  const cplx ref =
      std::sqrt(t) * integrate([&](double l) { return std::exp(I * (t * l * l + l * a)) * cut(l); }, -0.2, 0.2);
  EXPECT_LT(std::abs(chirp_shift(cut, t, a) - ref), 1e-10);
}

TEST(Chirp, JTableMatchesDirect) {
  const CutoffSpec cut(0.1);
  const double t = 100.0;
  const JTable J(cut, t, 12.0);
  EXPECT_LT(J.residual(), 1e-9);
  for (double s : {0.0, 3.7, 11.5}) {
    const cplx ref = std::sqrt(t) * integrate(
                                        [&](double l) {
                                          const double sinc = std::abs(l) < 1e-12 ? s : std::sin(l * s) / l;
                                          return std::exp(I * t * l * l) * cut(l) * sinc;
                                        },
                                        -0.1, 0.1);
    EXPECT_LT(std::abs(J(s) - ref), 1e-9) << s;
  }
}

TEST(Pairs, DeterministicAndOffSupport) {
  const PotentialSplit& s = resonant_data().split();
  const auto a = stratified_pairs(s, 30, 5), b = stratified_pairs(s, 30, 5), c = stratified_pairs(s, 30, 6);
  ASSERT_EQ(a.size(), 30u);
  bool differ = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].x, b[i].x);
    EXPECT_EQ(a[i].y, b[i].y);
    EXPECT_NE(a[i].x, a[i].y);
    EXPECT_EQ(s.V[a[i].x], 0.0);
    EXPECT_EQ(s.V[a[i].y], 0.0);
    differ = differ || a[i].x != c[i].x || a[i].y != c[i].y;
  }
  EXPECT_TRUE(differ);
}

TEST(KLambda, RegularMatchesDirectQuadrature) {
  const ThresholdData& td = regular_data();
  const CutoffSpec cut(td.lambda0());
  const auto pairs = stratified_pairs(td.split(), 3, 1);
  const LaurentExpansion le = laurent_of_A_inverse(td);
  const KLambdaPlan plan(td, le, cut, pairs);
  const double t = 50.0 / (td.lambda0() * td.lambda0());
  const std::vector<cplx> K = plan.values(t);
  const double w = td.grid().weight();
  // Composite 20-point Gauss-Legendre on (0, lambda0); g(-l) = -conj g(l) folds the band.
  const PairIndex idx = index_pairs(pairs);
  const auto& gr = gauss_rule();
  const int panels = 8;
  const double width = td.lambda0() / panels;
  std::vector<cplx> ref(pairs.size(), 0.0);
  for (int p = 0; p < panels; ++p)
    for (std::size_t k = 0; k < gr.x.size(); ++k) {
      const double l = width * (p + 0.5 * (gr.x[k] + 1.0));
      const CMatrix R = rv_block(td, l, idx.points, idx.points);
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        const cplx g = l * R(idx.slots[i].first, idx.slots[i].second) / w;
        ref[i] += 0.5 * width * gr.w[k] * (2.0 / pi) * std::exp(I * t * l * l) * cut(l) * g.imag();
      }
    }
  for (std::size_t i = 0; i < pairs.size(); ++i) EXPECT_LT(std::abs(K[i] - ref[i]), 1e-6 * std::abs(ref[i]) + 1e-12) << i;
}

TEST(KLambda, RegularDecaysLikeThreeHalves) {
  const ThresholdData& td = regular_data();
  const CutoffSpec cut(td.lambda0());
  const auto pairs = stratified_pairs(td.split(), 20, 1);
  const TheoremTable tab = theorem_check(td, cut, logspace(1e4, 1e6, 8), pairs);
  EXPECT_TRUE(tab.regular);
  EXPECT_NEAR(tab.slope, -1.5, 0.15);
}

TEST(KLambda, ResonantLeadingTermAndPairStability) {
  const ThresholdData& td = resonant_data();
  const CutoffSpec cut(td.lambda0());
  const auto times = logspace(50.0, 2000.0, 8);
  const TheoremTable a = theorem_check(td, cut, times, stratified_pairs(td.split(), 25, 1));
  const TheoremTable b = theorem_check(td, cut, times, stratified_pairs(td.split(), 50, 1));
  EXPECT_LT(std::abs(a.slope - b.slope), 0.05);
  for (const auto& row : b.rows)
    if (row.t >= 200.0) EXPECT_LT(row.D * std::sqrt(row.t), 0.1 * row.Ft_sup) << row.t;
}

TEST(KLambda, LeadingKernelIsRankOne) {
  const ThresholdData& td = resonant_data();
  const LaurentExpansion le = laurent_of_A_inverse(td);
  const FtKernel F = compute_F_t(td, le, CutoffSpec(td.lambda0()), 1e4, stratified_pairs(td.split(), 10, 2));
  EXPECT_TRUE(F.rank_one);
  EXPECT_LT(F.factorization_residual, 1e-10);
  for (std::size_t i = 0; i < F.values.size(); ++i)
    EXPECT_LT(std::abs(F.values[i] - F.leading[i] - F.f1[i]), 1e-14 * std::abs(F.values[i]));
  EXPECT_THROW(compute_F_t(regular_data(), laurent_of_A_inverse(regular_data()), CutoffSpec(regular_data().lambda0()),
                           1e4, stratified_pairs(regular_data().split(), 4, 2)),
               EmptySubspace);
}

TEST(Spectral, DenseEvolution) {
  const Grid3 g = build_grid(8, 4.0);
  RVector V = RVector::Zero(g.size());
  for (Index p = 0; p < g.size(); ++p)
    if (g.radius(p) < 1.5) V[p] = -3.0;
  const SpectralDecomposition sd(g, V);
  const GridFunction psi0 = gaussian(g, 1.0, {0.5, 0.0, 0.0});
  const auto at0 = evolve_dense_spectral(sd, psi0, {0.0}, false);
  EXPECT_LT((at0[0].values - psi0.values).norm(), 1e-11 * psi0.values.norm());
  const auto st = evolve_dense_spectral(sd, psi0, {0.7, 1.5}, false);
  EXPECT_NEAR(st[1].values.norm(), psi0.values.norm(), 1e-11);
  const auto two = evolve_dense_spectral(sd, st[0], {0.8}, false);
  EXPECT_LT((two[0].values - st[1].values).norm(), 1e-10);
  ASSERT_FALSE(sd.bound_set().empty());
  const auto ac = evolve_dense_spectral(sd, psi0, {1.0}, true);
  for (Index j : sd.bound_set()) EXPECT_LT(std::abs(sd.eigenvectors().col(j).cast<cplx>().dot(ac[0].values)), 1e-11);
}

TEST(SplitStep, FreeEvolutionIsExact) {
  const Grid3 g = build_grid(8, 4.0);
  const RVector V = RVector::Zero(g.size());
  const GridFunction psi0 = gaussian(g, 1.0);
  const SpectralDecomposition sd(g, V);
  const auto ref = evolve_dense_spectral(sd, psi0, {1.0}, false);
  const Trajectory tr = evolve_split_step(V, psi0, 0.1, 10);
  EXPECT_LT((tr.snapshots.back().values - ref[0].values).norm(), 1e-10 * psi0.values.norm());
}

TEST(SplitStep, NormAndSecondOrder) {
  const Grid3 g = build_grid(8, 4.0);
  RVector V = RVector::Zero(g.size());
  for (Index p = 0; p < g.size(); ++p) V[p] = -std::exp(-g.radius(p) * g.radius(p));
  const GridFunction psi0 = gaussian(g, 1.0, {0.5, 0.0, 0.0});
  const SpectralDecomposition sd(g, V);
  const CVector ref = evolve_dense_spectral(sd, psi0, {1.0}, false)[0].values;
  std::vector<double> err;
  for (int steps : {10, 20, 40}) {
    const Trajectory tr = evolve_split_step(V, psi0, 1.0 / steps, steps);
    EXPECT_NEAR(tr.snapshots.back().values.norm(), psi0.values.norm(), 1e-8 * psi0.values.norm());
    err.push_back((tr.snapshots.back().values - ref).norm());
  }
  EXPECT_GT(err[0] / err[1], 3.5);
  EXPECT_LT(err[0] / err[1], 4.5);
  EXPECT_GT(err[1] / err[2], 3.5);
  EXPECT_LT(err[1] / err[2], 4.5);
  EXPECT_THROW(SplitStepPropagator(g, RVector::Constant(g.size(), 10.0), 0.02), std::invalid_argument);
}

TEST(Decay, WindowRules) {
  std::vector<TrajectorySample> samples;
  for (double t : logspace(1.0, 100.0, 20)) samples.push_back({t, std::pow(t, -1.5), 1.0});
  const DecayFit fit = measure_sup_decay(samples, 1.0, 1.0, 100.0, 200.0);
  EXPECT_NEAR(fit.slope, -1.5, 1e-12);
  EXPECT_THROW(measure_sup_decay(samples, 1.0, 1.0, 5.0, 200.0), WindowTooShort);
  EXPECT_THROW(measure_sup_decay(samples, 1.0, 1.0, 100.0, 50.0), WindowTooShort);
  std::vector<TrajectorySample> sparse(samples.begin(), samples.begin() + 5);
  sparse.push_back(samples.back());
  EXPECT_THROW(measure_sup_decay(sparse, 1.0, 1.0, 100.0, 200.0), WindowTooShort);
}

TEST(Decay, RevivalEstimateFromMomentum) {
  const Grid3 g = build_grid(32, 8.0);
  const GridFunction psi = gaussian(g, 1.0);
  // A unit Gaussian amplitude has rms momentum sqrt(3/2).
  EXPECT_NEAR(rms_momentum(psi), std::sqrt(1.5), 1e-6);
  EXPECT_NEAR(revival_estimate(psi), 16.0 / std::sqrt(1.5), 1e-4);
}
