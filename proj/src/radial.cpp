#include "tscope/radial.hpp"

#include <cmath>
#include <stdexcept>

namespace tscope {

namespace {

struct Sweep {
  double u, du;
  int nodes;
};

Sweep integrate(const Potential& V, int ell, double R, long steps) {
  const double eps = 1e-6 * R;
  const double edge = std::nextafter(R, 0.0);
  const double l1 = ell * (ell + 1.0);
  auto rhs = [&](double r, double u) { return (V.value(std::min(r, edge)) + l1 / (r * r)) * u; };

  const double v0 = V.value(eps);
  const double c = v0 / (2.0 * (2.0 * ell + 3.0));
  double r = eps;
  double u = std::pow(eps, ell + 1) * (1.0 + c * eps * eps);
  double du = (ell + 1.0) * std::pow(eps, ell) + (ell + 3.0) * c * std::pow(eps, ell + 2);
  const double hs = (R - eps) / static_cast<double>(steps);
  int nodes = 0;
  for (long s = 0; s < steps; ++s) {
    const double k1u = du, k1d = rhs(r, u);
    const double k2u = du + 0.5 * hs * k1d, k2d = rhs(r + 0.5 * hs, u + 0.5 * hs * k1u);
    const double k3u = du + 0.5 * hs * k2d, k3d = rhs(r + 0.5 * hs, u + 0.5 * hs * k2u);
    const double k4u = du + hs * k3d, k4d = rhs(r + hs, u + hs * k3u);
    const double un = u + hs / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
    du += hs / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d);
    if (un * u < 0.0) ++nodes;
    u = un;
    r = (s + 1 == steps) ? R : eps + (s + 1) * hs;
  }
  return {u, du, nodes};
}

std::array<double, 2> match(int ell, double R, double u, double du) {
  const double a = (ell * u * std::pow(R, -ell - 1.0) + du * std::pow(R, -ell)) / (2.0 * ell + 1.0);
  const double b = ((ell + 1.0) * std::pow(R, ell) * u - std::pow(R, ell + 1.0) * du) / (2.0 * ell + 1.0);
  return {a, b};
}

}  // namespace

ShootingResult shoot_zero_energy(const Potential& V, int ell) {
  if (!V.is_radial()) throw std::invalid_argument("shoot_zero_energy: potential is not radial");
  if (ell < 0) throw std::invalid_argument("shoot_zero_energy: ell must be nonnegative");
  const double R = V.support_radius();
  const long steps = 10000;
  const auto s1 = integrate(V, ell, R, steps);
  const auto s2 = integrate(V, ell, R, 2 * steps);
  const auto m1 = match(ell, R, s1.u, s1.du);
  const auto m2 = match(ell, R, s2.u, s2.du);
  ShootingResult res;
  res.ell = ell;
  res.r_max = R;
  res.a = m2[0];
  res.b = m2[1];
  res.node_count = s2.nodes;
  const double scale = std::hypot(m2[0], m2[1]);
  res.step_change = std::hypot(m1[0] - m2[0], m1[1] - m2[1]) / scale;
  return res;
}

TuneResult tune_coupling(const Potential& W, int ell, double c_lo, double c_hi) {
  auto a_of = [&](double c) { return shoot_zero_energy(W.with_coupling(c), ell).a; };
  double lo = c_lo, hi = c_hi;
  double alo = a_of(lo);
  const double ahi = a_of(hi);
  if (!(alo * ahi < 0.0))
    throw std::invalid_argument("tune_coupling: bracket does not straddle a sign change of a");
  TuneResult t;
  for (t.iterations = 1; t.iterations <= 200; ++t.iterations) {
    const double mid = 0.5 * (lo + hi);
    const double am = a_of(mid);
    t.c_star = mid;
    t.residual_a = am;
    if (std::abs(am) < 1e-10 || hi - lo < 4e-16 * std::abs(mid)) break;
    if ((am < 0.0) == (alo < 0.0)) {
      lo = mid;
      alo = am;
    } else {
      hi = mid;
    }
  }
  return t;
}

}  // namespace tscope
