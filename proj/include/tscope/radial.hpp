#pragma once

#include "tscope/potential.hpp"

namespace tscope {

struct ShootingResult {
  int ell = 0;
  double r_max = 0.0;
  double a = 0.0;  // coefficient of r^(l+1)
  double b = 0.0;  // coefficient of r^(-l)
  int node_count = 0;
  // Relative change of (a, b) when the step is halved.
  double step_change = 0.0;
};

// Zero-energy radial shooting with RK4, matched to the free solutions at the support edge.
ShootingResult shoot_zero_energy(const Potential& V, int ell);

struct TuneResult {
  double c_star = 0.0;
  double residual_a = 0.0;
  int iterations = 0;
};

// Bisection on the coupling c of c*W until the growing coefficient |a| < 1e-10.
TuneResult tune_coupling(const Potential& W, int ell, double c_lo, double c_hi);

}  // namespace tscope
