#pragma once

#include "tscope/potential.hpp"

namespace tscope {

// (e^{ix} - 1)/x and (e^{ix} - 1 - ix)/x^2 without cancellation.
cplx expm1_over_x(double x);
cplx expm1_minus_ix_over_x2(double x);

// A(lambda) = U + v R0(lambda^2) v restricted to supp v. Off the support the
// operator is the diagonal U and decouples, so every matrix here is
// support-size; `embed` lifts a support block back to the full grid.
class BirmanSchwingerFamily {
public:
  explicit BirmanSchwingerFamily(PotentialSplit split);

  const PotentialSplit& split() const { return split_; }
  const Grid3& grid() const { return split_.grid; }
  Index dim() const { return static_cast<Index>(split_.support.size()); }
  const RVector& v_support() const { return v_; }
  const RVector& U_support() const { return U_; }
  const RMatrix& distances() const { return dist_; }

  const RMatrix& A0() const { return A0_; }
  CMatrix A1(double lambda) const;
  CMatrix A2(double lambda) const;
  CMatrix A(double lambda) const;

  // v G_j v on the support.
  RMatrix vGjv(int j) const;
  // d/dlambda A2 at 0, equal to -i v G3 v.
  CMatrix A2_prime0() const;

  CMatrix embed(const CMatrix& block, bool with_U_outside) const;

private:
  PotentialSplit split_;
  RVector v_, U_;
  RMatrix dist_;
  RMatrix A0_;
};

}  // namespace tscope
