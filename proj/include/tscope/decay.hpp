#pragma once

#include "tscope/split_step.hpp"

#include <vector>

namespace tscope {

struct DecayFit {
  std::vector<double> times;
  std::vector<double> sup_norms;
  double t_min = 0.0, t_max = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double revival_time = 0.0;
};

// Box revival estimate 2L/p, with p the rms momentum of the initial state.
double revival_estimate(const GridFunction& psi0);

// Fits log(sup|psi|/||psi0||_1) against log t over [t_min, t_max].
// Throws WindowTooShort when the window does not span a decade below the revival estimate
// or holds fewer than 8 samples.
DecayFit measure_sup_decay(const std::vector<TrajectorySample>& samples, double psi0_l1_norm, double t_min,
                           double t_max, double revival_time);

}  // namespace tscope
