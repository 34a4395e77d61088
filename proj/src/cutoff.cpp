#include "tscope/cutoff.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <stdexcept>

namespace tscope {

namespace {

// psi(x) = exp(-1/x) and two derivatives, zero for x <= 0.
std::array<double, 3> psi(double x) {
  if (x <= 0.0) return {0.0, 0.0, 0.0};
  const double e = std::exp(-1.0 / x);
  const double x2 = x * x;
  return {e, e / x2, e * (1.0 / (x2 * x2) - 2.0 / (x2 * x))};
}

}  // namespace

CutoffSpec::CutoffSpec(double lambda0) : lambda0_(lambda0) {
  if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) throw std::invalid_argument("CutoffSpec: lambda0 must be positive");
}

std::array<double, 3> CutoffSpec::profile(double s) {
  const double a = std::abs(s);
  if (a <= 0.5) return {1.0, 0.0, 0.0};
  if (a >= 1.0) return {0.0, 0.0, 0.0};
  const double sg = s < 0 ? -1.0 : 1.0;
  const auto A = psi(1.0 - a);
  const auto B = psi(a - 0.5);
  const double N = A[0], D = A[0] + B[0];
  const double Np = -sg * A[1], Dp = -sg * A[1] + sg * B[1];
  const double Npp = A[2], Dpp = A[2] + B[2];
  const double chi = N / D;
  const double d1 = (Np * D - N * Dp) / (D * D);
  const double d2 = (Npp * D - N * Dpp) / (D * D) - 2.0 * Dp * (Np * D - N * Dp) / (D * D * D);
  return {chi, d1, d2};
}

double CutoffSpec::profile_hat(double xi) {
  // 2 * integral_0^1 chi(s) cos(s xi) ds; the plateau part is closed form.
  const double plateau = std::abs(xi) < 1e-8 ? 1.0 - xi * xi / 24.0 : 2.0 * std::sin(0.5 * xi) / xi;
  const int panels = 8 + static_cast<int>(std::abs(xi) / 4.0);
  const auto& gr = gauss_rule();
  double edge = 0.0;
  const double w = 0.5 / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = 0.5 + p * w;
    for (std::size_t k = 0; k < gr.x.size(); ++k) {
      const double s = a + 0.5 * w * (gr.x[k] + 1.0);
      edge += 0.5 * w * gr.w[k] * profile(s)[0] * std::cos(s * xi);
    }
  }
  return plateau + 2.0 * edge;
}

const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    using G = boost::math::quadrature::gauss<double, 20>;
    GaussRule r;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = a.size(); i-- > 0;) {
      r.x.push_back(-a[i]);
      r.w.push_back(w[i]);
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      r.x.push_back(a[i]);
      r.w.push_back(w[i]);
    }
    return r;
  }();
  return rule;
}

}  // namespace tscope
