#include "tscope/birman_schwinger.hpp"
#include "tscope/errors.hpp"
#include "tscope/experiments.hpp"
#include "tscope/jensen_nenciu.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tscope;

namespace {

BirmanSchwingerFamily small_family() {
  const Grid3 g = build_grid(8, 2.0);
  return BirmanSchwingerFamily(split_potential(Potential::square_well(3.0, 1.0), g));
}

using LMatrix = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace

TEST(ExpHelpers, MatchSeriesAndDirectForms) {
  for (double x : {1e-9, 1e-5, 1e-3, 0.1, 1.0, 7.0}) {
    // Taylor sums of e^{ix} with the leading terms removed.
    cplx e1 = 0.0, e2 = 0.0, term = 1.0;
    for (int k = 1; k < 60; ++k) {
      term *= cplx(0.0, x) / double(k);
      e1 += term / x;
      if (k >= 2) e2 += term / (x * x);
    }
    EXPECT_LT(std::abs(expm1_over_x(x) - e1), 1e-12);
    EXPECT_LT(std::abs(expm1_minus_ix_over_x2(x) - e2), 1e-12);
  }
  EXPECT_EQ(expm1_over_x(0.0), cplx(0.0, 1.0));
  EXPECT_EQ(expm1_minus_ix_over_x2(0.0), cplx(-0.5, 0.0));
}

TEST(BirmanSchwinger, ComplexSymmetric) {
  const auto fam = small_family();
  EXPECT_LT((fam.A0() - fam.A0().transpose()).norm(), 1e-14);
  const CMatrix A = fam.A(0.4);
  EXPECT_LT((A - A.transpose()).norm(), 1e-13);
}

TEST(BirmanSchwinger, ExpansionIdentities) {
  const auto fam = small_family();
  for (double l : {0.3, 0.01}) {
    EXPECT_LT((fam.A(l) - (fam.A0().cast<cplx>() + l * fam.A1(l))).norm(), 1e-12 * fam.A0().norm());
    EXPECT_LT((fam.A1(l) - (fam.A1(0.0) + l * fam.A2(l))).norm(), 1e-12 * fam.A1(0.0).norm());
  }
  EXPECT_LT((fam.A1(0.0) - cplx(0.0, 1.0) * fam.vGjv(1).cast<cplx>()).norm(), 1e-14);
  EXPECT_LT((fam.A2(0.0) + fam.vGjv(2).cast<cplx>()).norm(), 1e-14);
}

TEST(BirmanSchwinger, A2DerivativeMatchesFiniteDifference) {
  const auto fam = small_family();
  const CMatrix d = fam.A2_prime0();
  const double h = 1e-4;
  const CMatrix fd = (fam.A2(h) - fam.A2(-h)) / (2 * h);
  EXPECT_LT((fd - d).norm(), 1e-6 * d.norm());
}

TEST(BirmanSchwinger, CubicRemainderNearZero) {
  const auto fam = small_family();
  double prev = 0.0;
  for (double l : {1e-2, 5e-3}) {
    const CMatrix series = fam.A0().cast<cplx>() + l * fam.A1(0.0) + l * l * fam.A2(0.0) + l * l * l * fam.A2_prime0();
    const double r = (fam.A(l) - series).norm();
    if (prev > 0) EXPECT_NEAR(prev / r, 16.0, 1.0);
    prev = r;
  }
}

TEST(BirmanSchwinger, EmbedRestoresU) {
  const auto fam = small_family();
  const CMatrix full = fam.embed(fam.A(0.2), true);
  const Index N = fam.grid().size();
  ASSERT_EQ(full.rows(), N);
  const auto& sup = fam.split().support;
  for (Index p = 0; p < N; ++p)
    if (std::find(sup.begin(), sup.end(), p) == sup.end()) EXPECT_EQ(full(p, p), cplx(fam.split().U[p], 0.0));
}

TEST(JensenNenciu, GapAmbiguityThrows) {
  RMatrix a = RMatrix::Zero(3, 3);
  a(0, 0) = 1e-9;
  a(1, 1) = 5e-7;
  a(2, 2) = 1.0;
  EXPECT_THROW(kernel_projection(a, 1e-8), GapAmbiguity);
  const Projection p = kernel_projection(a, 1e-8, 10.0);
  EXPECT_EQ(p.dim(), 1);
}

TEST(JensenNenciu, NearSingularThrows) {
  OperatorFamily fam;
  fam.a0 = CMatrix::Identity(2, 2);
  fam.a0(1, 1) = 0.0;
  fam.a1_at = [](cplx) { return CMatrix::Zero(2, 2).eval(); };
  const Projection none = projection_from_frame(CMatrix::Zero(2, 0));
  EXPECT_THROW(gamma_inverse(fam, none, 0.1), NearSingular);
}

TEST(JensenNenciu, BNotInvertibleThrows) {
  // a1 annihilates the kernel direction, so B(z) is zero to leading order.
  OperatorFamily fam;
  fam.a0 = CMatrix::Identity(2, 2);
  fam.a0(1, 1) = 0.0;
  fam.a1_at = [](cplx) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = 1.0;
    return m;
  };
  CMatrix e = CMatrix::Zero(2, 1);
  e(1, 0) = 1.0;
  EXPECT_THROW(singular_inverse(fam, projection_from_frame(e), 0.1), BNotInvertible);
}

TEST(JensenNenciu, RandomFamiliesMatchLongDouble) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 6, r = 2;
    CMatrix q = CMatrix::NullaryExpr(n, n, [&] { return cplx(nd(rng), nd(rng)); });
    q = Eigen::HouseholderQR<CMatrix>(q).householderQ();
    RVector mu(n);
    for (int i = 0; i < n; ++i) mu[i] = i < r ? 0.0 : 1.0 + i;
    OperatorFamily fam;
    fam.a0 = q * mu.cast<cplx>().asDiagonal() * q.adjoint();
    CMatrix a1 = CMatrix::NullaryExpr(n, n, [&] { return cplx(nd(rng), nd(rng)); });
    a1 = (a1 + a1.adjoint()).eval();
    fam.a1_at = [a1](cplx) { return a1; };
    const Projection S = projection_from_frame(q.leftCols(r));
    const cplx z(1e-3, 0.0);
    const CMatrix inv = singular_inverse(fam, S, z);
    LMatrix al = fam.at(z).cast<std::complex<long double>>();
    const LMatrix ref = al.partialPivLu().inverse();
    const CMatrix refd = ref.cast<cplx>();
    EXPECT_LT((inv - refd).norm() / refd.norm(), 1e-10);
  }
}
