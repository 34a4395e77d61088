#pragma once

#include "tscope/birman_schwinger.hpp"
#include "tscope/jensen_nenciu.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace tscope {

struct ThresholdOptions {
  // <= 0 selects the automatic scale: rel_eps times the spectral radius of A0
  // (level one) or times alpha/(4 pi) (level two).
  double eps_rank = 0.0;
  double rel_eps = 1e-8;
  double gap_factor = 100.0;
  // <= 0 starts the dyadic search at 0.5/L.
  double lambda0 = 0.0;
  double lambda0_condition_limit = 1e8;
};

enum class ThresholdClass { regular, resonance_only, eigenvalue_only, resonance_and_eigenvalue };
std::string to_string(ThresholdClass c);

struct Classification {
  ThresholdClass cls = ThresholdClass::regular;
  Index rank_s1 = 0;
  Index rank_s2 = 0;
  double kept_margin_s1 = 0.0;
  double discarded_margin_s1 = 0.0;
  double kept_margin_s2 = 0.0;
  double discarded_margin_s2 = 0.0;
};

// Quantities of the two-level reduction at a fixed lambda.
struct LevelEval {
  CMatrix gamma1;   // (A(l) + S1)^{-1}, support size
  CMatrix m;        // m(l) = m0 + l m1(l), r1 x r1
  CMatrix m1;       // m1(l)
  CMatrix gamma2;   // (m(l) + S2)^{-1}, r1 x r1
  CMatrix b;        // b(l), r2 x r2
  CMatrix inverse;  // A(l)^{-1} through the hierarchy
};

class ThresholdData {
public:
  ThresholdData(std::shared_ptr<const BirmanSchwingerFamily> family, const ThresholdOptions& opt = {});

  const BirmanSchwingerFamily& family() const { return *family_; }
  const PotentialSplit& split() const { return family_->split(); }
  const Grid3& grid() const { return family_->grid(); }

  double eps_rank() const { return eps_rank_; }
  double eps_rank2() const { return eps_rank2_; }
  const Projection& s1() const { return s1_; }
  // Frame in the coordinates of range(S1).
  const Projection& s2() const { return s2_; }
  // S2 frame lifted to support coordinates, E1 * F2.
  CMatrix s2_support_frame() const { return s1_.frame * s2_.frame; }
  // A0 with the kept near-zero eigenvalues set to zero.
  const RMatrix& a0_deflated() const { return a0d_; }
  const CMatrix& m0() const { return m0_; }
  const CMatrix& b0() const { return b0_; }
  double b0_min_eigenvalue() const { return b0_min_eig_; }
  double lambda0() const { return lambda0_; }
  double lambda0_condition() const { return lambda0_cond_; }

  OperatorFamily level1() const;
  CMatrix gamma1_at(double lambda) const;
  CMatrix m1_at(double lambda, const CMatrix& gamma1) const;
  CMatrix m_at(double lambda) const;
  CMatrix b_at(double lambda) const;
  LevelEval evaluate(double lambda) const;
  CMatrix inverse_at(double lambda) const { return evaluate(lambda).inverse; }
  // Dense LU inverse of A0_deflated + lambda A1(lambda).
  CMatrix direct_inverse(double lambda) const;

  // Derivative data at lambda = 0.
  CMatrix gamma1_0() const;
  CMatrix m1_0() const;

private:
  void select_lambda0(const ThresholdOptions& opt);

  std::shared_ptr<const BirmanSchwingerFamily> family_;
  double eps_rank_ = 0.0, eps_rank2_ = 0.0;
  Projection s1_, s2_;
  RMatrix a0d_;
  CMatrix m0_, b0_;
  double b0_min_eig_ = 0.0;
  double lambda0_ = 0.0, lambda0_cond_ = 0.0;
};

ThresholdData compute_threshold_data(const PotentialSplit& split, const ThresholdOptions& opt = {});
Classification classify_threshold(const ThresholdData& td);

struct LaurentExpansion {
  CMatrix c_minus2;
  CMatrix c_minus1;
  double radius = 0.0;
  std::function<CMatrix(double)> regular_at;
};

LaurentExpansion laurent_of_A_inverse(const ThresholdData& td);

// g = -G0 (v f) on the full grid for f in range(S1) (support coordinates).
GridFunction resonance_function(const ThresholdData& td, const CVector& f);

struct P0Data {
  CMatrix phi;       // columns phi_j = -G0 v psi_j, full grid
  CMatrix gram;      // <phi_i, phi_j> on the box (Euclidean)
  CMatrix p0;        // full-size projection onto span(phi)
  double gram_vs_b0 = 0.0;  // ||gram - b0|| / ||b0||, box truncation diagnostic
};

P0Data compute_P0(const ThresholdData& td);

// Quadrature-weighted R_V(lambda^2 + i0) block between grid index sets.
CMatrix rv_block(const ThresholdData& td, double lambda, const std::vector<Index>& rows,
                 const std::vector<Index>& cols, const CMatrix* inverse = nullptr);
CMatrix assemble_RV_plus(const ThresholdData& td, double lambda);

struct JumpFit {
  std::vector<double> energies;
  std::vector<double> norms;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

// Operator norm of R_V^+ - R_V^- at energies E = lambda^2 and its log-log slope in E.
// The -lambda^{-2} P0-type term is even and real in lambda and drops out of the jump.
JumpFit spectral_jump_exponent(const ThresholdData& td, const std::vector<double>& energies);

struct GridTuning {
  double coupling = 0.0;
  double mu = 0.0;  // signed A0 eigenvalue closest to zero at the returned coupling
  int evaluations = 0;
};

// Coupling c in [c_lo, c_hi] at which A0 for c*W has an exact zero eigenvalue.
GridTuning tune_on_grid(const Potential& W, const Grid3& g, double c_lo, double c_hi);

}  // namespace tscope
