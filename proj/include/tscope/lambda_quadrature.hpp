#pragma once

#include "tscope/cutoff.hpp"
#include "tscope/threshold.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace tscope {

// Chebyshev series on [-1, 1] with one coefficient row per degree and one column per component.
struct ChebyshevSeries {
  CMatrix coeffs;  // degree x components

  Index degree_count() const { return coeffs.rows(); }
  CVector operator()(double s) const;
};

// Interpolates f on n Chebyshev points of the first kind. When `odd_conjugate` is set,
// f(-s) = -conj f(s) is assumed and f is only evaluated at the positive points.
ChebyshevSeries chebyshev_interpolate(const std::function<CVector(double)>& f, int n, bool odd_conjugate);

struct QuadratureOptions {
  double tolerance = 1e-10;
  // Upper bound on t lambda0^2 / (2 pi), the oscillation count of e^{i t lambda^2} on the band.
  double max_oscillations = 1e6;
  int max_nodes = 64;
  double interpolation_tolerance = 1e-6;
};

double oscillation_count(double t, double lambda0);

// M_k(t) = integral over (-lambda0, lambda0) of e^{i t l^2} chi(l/lambda0) T_k(l/lambda0) dl, k < n.
CVector chirp_moments(const CutoffSpec& cutoff, double t, int n, const QuadratureOptions& opt = {});

struct HofT {
  cplx value;
  double refinement_change = 0.0;
  bool u_route = false;
};

// h(t) = sqrt(t) * integral of e^{i t l^2} chi_{lambda0}(l) dl; h -> sqrt(pi) e^{i pi/4}.
HofT h_lambda_route(const CutoffSpec& cutoff, double t, const QuadratureOptions& opt = {});
// Same quantity through the Fourier side: (e^{i pi/4}/sqrt(pi)) * integral_0^inf chi^(xi) e^{-i xi^2/(4 t lambda0^2)} dxi.
HofT h_u_route(const CutoffSpec& cutoff, double t);
HofT compute_h_of_t(const CutoffSpec& cutoff, double t, const QuadratureOptions& opt = {});
cplx h_limit();

// C(t, a) = sqrt(t) * integral of e^{i t l^2 + i l a} chi_{lambda0}(l) dl by direct quadrature,
// and its split C = e^{-i a^2/4t} h(t) + C2(t, a).
cplx chirp_shift(const CutoffSpec& cutoff, double t, double a, const QuadratureOptions& opt = {});

struct C2Check {
  std::vector<double> times, shifts;
  RMatrix ratio;  // |C2(t,a)| t / |a|
  double max_ratio = 0.0;
};
C2Check check_c2_bound(const CutoffSpec& cutoff, const std::vector<double>& times, const std::vector<double>& shifts);

// J(t, s) = sqrt(t) * integral of e^{i t l^2} chi_{lambda0}(l) sin(l s)/l dl as a Chebyshev table on [0, s_max].
class JTable {
public:
  JTable(const CutoffSpec& cutoff, double t, double s_max, const QuadratureOptions& opt = {});
  cplx operator()(double s) const;
  double residual() const { return residual_; }

private:
  double s_max_;
  ChebyshevSeries series_;
  double residual_ = 0.0;
};

struct SamplePair {
  Index x = 0, y = 0;
};

// `count` pairs of distinct off-support grid points, stratified by |x| + |y|.
std::vector<SamplePair> stratified_pairs(const PotentialSplit& split, int count, std::uint64_t seed);

// Rows/columns touched by a pair list, with each pair's position in them.
struct PairIndex {
  std::vector<Index> points;
  std::vector<std::pair<Index, Index>> slots;
};
PairIndex index_pairs(const std::vector<SamplePair>& pairs);

// Explicit leading kernels F_t and F_{1,t} as densities at the sample pairs.
struct FtKernel {
  double t = 0.0;
  cplx h;
  bool rank_one = false;
  bool has_f1 = false;
  // v C_{-1} v and v C_{-2} v on the support.
  CMatrix core1, core2;
  // Rank-one factors of core1 (core1 ~ s_left s_right^T) when rank_one.
  CVector s_left, s_right;
  double factorization_residual = 0.0;
  std::vector<cplx> values;       // F_t + F_{1,t} per pair
  std::vector<cplx> leading;      // F_t per pair
  std::vector<cplx> f1;           // F_{1,t} per pair
  std::vector<cplx> factored;     // scalar * left(x) * right(y) per pair, when rank_one
  double sup() const;
};

// Throws EmptySubspace when the threshold is regular.
FtKernel compute_F_t(const ThresholdData& td, const LaurentExpansion& le, const CutoffSpec& cutoff, double t,
                     const std::vector<SamplePair>& pairs, const QuadratureOptions& opt = {});

// K_{lambda0}(t, x, y) = (1/(pi i)) integral of e^{i t l^2} l chi_{lambda0}(l) R_V((l + i0)^2)(x, y) dl,
// with the even l^{-2} part of R_V dropped (it integrates to zero against the even weight).
class KLambdaPlan {
public:
  KLambdaPlan(const ThresholdData& td, const LaurentExpansion& le, const CutoffSpec& cutoff,
              std::vector<SamplePair> pairs, const QuadratureOptions& opt = {});

  const std::vector<SamplePair>& pairs() const { return pairs_; }
  int node_count() const { return nodes_; }
  double interpolation_residual() const { return residual_; }
  // Densities at each pair.
  std::vector<cplx> values(double t) const;

private:
  CutoffSpec cutoff_;
  QuadratureOptions opt_;
  std::vector<SamplePair> pairs_;
  ChebyshevSeries g_;
  int nodes_ = 0;
  double residual_ = 0.0;
};

struct TheoremRow {
  double t = 0.0;
  double D = 0.0;
  double Ft_sup = 0.0;
  double K_sup = 0.0;
};

struct TheoremTable {
  std::vector<TheoremRow> rows;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int chebyshev_nodes = 0;
  double interpolation_residual = 0.0;
  bool regular = false;
};

// D(t) = max over pairs |K_{lambda0}(t) - t^{-1/2} F_t|; F_t = 0 for a regular threshold.
TheoremTable theorem_check(const ThresholdData& td, const CutoffSpec& cutoff, const std::vector<double>& times,
                           const std::vector<SamplePair>& pairs, const QuadratureOptions& opt = {});

// <F_t f, g> over the whole grid for grid functions f, g; `limit` replaces F_t by its t -> infinity form.
cplx weak_pairing(const ThresholdData& td, const LaurentExpansion& le, const CutoffSpec& cutoff, double t,
                  const CVector& f, const CVector& g, bool limit = false);

}  // namespace tscope
