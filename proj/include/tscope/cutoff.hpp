#pragma once

#include <array>
#include <vector>

namespace tscope {

// chi(s) = psi(1-|s|) / (psi(1-|s|) + psi(|s|-1/2)), psi(x) = exp(-1/x) for x > 0:
// smooth, even, 1 on [-1/2, 1/2], 0 outside (-1, 1).
class CutoffSpec {
public:
  explicit CutoffSpec(double lambda0);

  double lambda0() const { return lambda0_; }
  // Profile on the unit scale with its first two derivatives.
  static std::array<double, 3> profile(double s);
  double operator()(double lambda) const { return profile(lambda / lambda0_)[0]; }

  // chi^(xi) = integral chi(s) e^{-i s xi} ds of the unit profile.
  static double profile_hat(double xi);

private:
  double lambda0_;
};

// 20-point Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x, w;
};
const GaussRule& gauss_rule();

}  // namespace tscope
