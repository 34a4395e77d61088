#pragma once

#include "tscope/grid.hpp"

#include <functional>
#include <limits>

namespace tscope {

// Orthogonal projection held as an orthonormal frame; P = frame * frame^*.
struct Projection {
  CMatrix frame;
  // Largest |mu| kept and smallest |mu| discarded by kernel_projection.
  double kept_margin = 0.0;
  double discarded_margin = std::numeric_limits<double>::infinity();
  RVector kept_eigenvalues;

  Index ambient() const { return frame.rows(); }
  Index dim() const { return frame.cols(); }
  CMatrix matrix() const { return frame * frame.adjoint(); }
};

Projection projection_from_frame(CMatrix frame);

// Orthogonal projection onto eigenvectors of the Hermitian a0 with |mu| < eps_rank.
// Throws GapAmbiguity if some |mu| lies in [eps_rank, gap_factor * eps_rank).
Projection kernel_projection(const CMatrix& a0, double eps_rank, double gap_factor = 100.0);
Projection kernel_projection(const RMatrix& a0, double eps_rank, double gap_factor = 100.0);

// A(z) = a0 + z * a1(z).
struct OperatorFamily {
  CMatrix a0;
  std::function<CMatrix(cplx)> a1_at;
  bool hermitian = true;

  CMatrix at(cplx z) const { return a0 + z * a1_at(z); }
};

inline constexpr double max_condition = 1e12;

struct JNSolve {
  CMatrix gamma;    // (A(z) + S)^{-1}
  CMatrix B;        // (S - S gamma S)/z in the frame basis
  CMatrix inverse;  // A(z)^{-1}
  double cond_gamma = 0.0;
  double cond_B = 0.0;
};

// (A(z) + S)^{-1}; throws NearSingular past max_condition.
CMatrix gamma_inverse(const OperatorFamily& fam, const Projection& S, cplx z, double* cond = nullptr);
CMatrix b_operator(const OperatorFamily& fam, const Projection& S, cplx z);
JNSolve jn_solve(const OperatorFamily& fam, const Projection& S, cplx z);
CMatrix singular_inverse(const OperatorFamily& fam, const Projection& S, cplx z);
// D(z) = z (S + S A(z)^{-1} S) in the frame basis.
CMatrix duality_D(const OperatorFamily& fam, const Projection& S, cplx z);

// 1/rcond estimate from an LU factorisation.
double condition_estimate(const CMatrix& m);

}  // namespace tscope
