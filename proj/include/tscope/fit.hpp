#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace tscope {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double rms_residual = 0.0;
};

// Least-squares line through (log x, log y).
inline LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_loglog: need at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  LineFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ly = std::log(y[i]);
    const double e = ly - (f.intercept + f.slope * std::log(x[i]));
    ss_res += e * e;
    ss_tot += (ly - mean) * (ly - mean);
  }
  f.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  f.rms_residual = std::sqrt(ss_res / n);
  return f;
}

}  // namespace tscope
