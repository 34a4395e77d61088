#include "tscope/decay.hpp"

#include "tscope/errors.hpp"
#include "tscope/fit.hpp"

#include <sstream>

namespace tscope {

double revival_estimate(const GridFunction& psi0) {
  const double p = rms_momentum(psi0);
  return p > 0.0 ? 2.0 * psi0.grid.L() / p : std::numeric_limits<double>::infinity();
}

DecayFit measure_sup_decay(const std::vector<TrajectorySample>& samples, double psi0_l1_norm, double t_min,
                           double t_max, double revival_time) {
  DecayFit fit;
  fit.t_min = t_min;
  fit.t_max = t_max;
  fit.revival_time = revival_time;
  if (!(t_min > 0.0) || t_max < 10.0 * t_min * (1.0 - 1e-9) || t_max > revival_time) {
    std::ostringstream os;
    os << "decay window [" << t_min << ", " << t_max << "] must span a decade below the revival estimate "
       << revival_time << "; enlarge L";
    throw WindowTooShort(os.str());
  }
  for (const auto& s : samples) {
    if (s.t < t_min * (1.0 - 1e-9) || s.t > t_max * (1.0 + 1e-9)) continue;
    fit.times.push_back(s.t);
    fit.sup_norms.push_back(s.sup_norm / psi0_l1_norm);
  }
  if (fit.times.size() < 8) throw WindowTooShort("decay window holds fewer than 8 samples");
  const LineFit lf = fit_loglog(fit.times, fit.sup_norms);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.r_squared = lf.r_squared;
  return fit;
}

}  // namespace tscope
