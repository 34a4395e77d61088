#include "tscope/potential.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <stdexcept>

namespace tscope {

std::string to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::square_well: return "square_well";
    case PotentialKind::resonant: return "resonant";
    case PotentialKind::eigen: return "eigen";
    case PotentialKind::grid: return "grid";
  }
  return "unknown";
}

QuinticBlend::QuinticBlend(double a, double b, std::array<double, 3> l, std::array<double, 3> r)
    : a_(a), H_(b - a) {
  c_[0] = l[0];
  c_[1] = H_ * l[1];
  c_[2] = 0.5 * H_ * H_ * l[2];
  const double A = r[0] - (c_[0] + c_[1] + c_[2]);
  const double B = H_ * r[1] - (c_[1] + 2.0 * c_[2]);
  const double C = H_ * H_ * r[2] - 2.0 * c_[2];
  c_[3] = 10.0 * A - 4.0 * B + 0.5 * C;
  c_[4] = -15.0 * A + 7.0 * B - C;
  c_[5] = 6.0 * A - 3.0 * B + 0.5 * C;
}

std::array<double, 3> QuinticBlend::operator()(double r) const {
  const double t = (r - a_) / H_;
  double p = 0, d = 0, s = 0;
  for (int k = 5; k >= 0; --k) p = p * t + c_[k];
  for (int k = 5; k >= 1; --k) d = d * t + k * c_[k];
  for (int k = 5; k >= 2; --k) s = s * t + k * (k - 1) * c_[k];
  return {p, d / H_, s / (H_ * H_)};
}

namespace {

void check_positive_on_blend(const QuinticBlend& q, double R, const char* who) {
  for (int i = 0; i <= 4000; ++i) {
    const double r = 0.5 * R + 0.5 * R * i / 4000.0;
    if (!(q(r)[0] > 0.0)) throw std::invalid_argument(std::string(who) + ": profile vanishes inside the support");
  }
}

void check_radius(double R, const char* who) {
  if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument(std::string(who) + ": R must be finite and positive");
}

void check_shape(const std::string& shape, const char* who) {
  if (shape != "quintic") throw std::invalid_argument(std::string(who) + ": unknown shape '" + shape + "'");
}

}  // namespace

double Potential::shape(double r) const {
  if (!is_radial()) throw std::logic_error("Potential::shape on grid samples");
  return shape_(r);
}

double Potential::l1_norm() const {
  if (!is_radial()) throw std::logic_error("Potential::l1_norm on grid samples");
  auto f = [this](double r) { return 4.0 * pi * r * r * std::abs(value(r)); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double mid = 0.5 * R_;
  return GK::integrate(f, 0.0, mid, 12, 1e-13) + GK::integrate(f, mid, R_, 12, 1e-13);
}

RVector Potential::sample(const Grid3& g) const {
  if (!is_radial()) {
    if (!(grid_ && *grid_ == g)) throw std::invalid_argument("grid potential sampled on a different grid");
    return coupling_ * grid_values_;
  }
  if (R_ >= g.L()) throw std::invalid_argument("potential support radius must be below the grid half-width");
  RVector out(g.size());
  for (Index p = 0; p < g.size(); ++p) {
    const double r = g.radius(p);
    out[p] = r < R_ ? value(r) : 0.0;
    if (!std::isfinite(out[p])) throw std::invalid_argument("potential sample is not finite");
  }
  if (sampling_ == Sampling::l1_preserving) {
    const double grid_l1 = g.weight() * out.cwiseAbs().sum();
    if (grid_l1 > 0.0) out *= l1_norm() / grid_l1;
  }
  return out;
}

Potential Potential::with_coupling(double c) const {
  if (!std::isfinite(c)) throw std::invalid_argument("coupling must be finite");
  Potential p = *this;
  p.coupling_ = c;
  if (kind_ == PotentialKind::square_well) {
    const double R = R_;
    p.solution_ = [c, R](double r) {
      const double k = std::sqrt(std::abs(c));
      auto inner = [&](double s) -> std::array<double, 2> {
        if (k == 0.0) return {s, 1.0};
        if (c > 0) return {std::sin(k * s) / k, std::cos(k * s)};
        return {std::sinh(k * s) / k, std::cosh(k * s)};
      };
      if (r < R) return inner(r)[0];
      const auto e = inner(R);
      return e[0] + e[1] * (r - R);
    };
  }
  return p;
}

Potential Potential::with_sampling(Sampling s) const {
  Potential p = *this;
  p.sampling_ = s;
  return p;
}

GridFunction Potential::known_solution(const Grid3& g) const {
  if (!solution_) throw std::logic_error("potential carries no zero-energy solution");
  CVector vals(g.size());
  for (Index p = 0; p < g.size(); ++p) {
    const auto x = g.point(p);
    const double r = g.radius(p);
    vals[p] = ell_ == 0 ? solution_(r) / r : solution_(r) / r * (x[2] / r);
  }
  return GridFunction(g, vals);
}

Potential Potential::square_well(double depth, double radius) {
  check_radius(radius, "square_well");
  Potential p;
  p.kind_ = PotentialKind::square_well;
  p.R_ = radius;
  p.ell_ = 0;
  p.sampling_ = Sampling::l1_preserving;
  p.shape_ = [radius](double r) { return r < radius ? -1.0 : 0.0; };
  return p.with_coupling(depth);
}

Potential Potential::resonant(double R, const std::string& shape) {
  check_radius(R, "resonant");
  check_shape(shape, "resonant");
  const QuinticBlend q(0.5 * R, R, {0.5 * R, 1.0, 0.0}, {1.0, 0.0, 0.0});
  check_positive_on_blend(q, R, "resonant");
  Potential p;
  p.kind_ = PotentialKind::resonant;
  p.R_ = R;
  p.ell_ = 0;
  p.shape_ = [q, R](double r) {
    if (r < 0.5 * R || r >= R) return 0.0;
    const auto u = q(r);
    return u[2] / u[0];
  };
  p.solution_ = [q, R](double r) {
    if (r < 0.5 * R) return r;
    if (r >= R) return 1.0;
    return q(r)[0];
  };
  return p;
}

Potential Potential::eigen(double R, const std::string& shape) {
  check_radius(R, "eigen");
  check_shape(shape, "eigen");
  const double a = 0.5 * R;
  const QuinticBlend q(a, R, {a * a, 2.0 * a, 2.0}, {1.0 / R, -1.0 / (R * R), 2.0 / (R * R * R)});
  check_positive_on_blend(q, R, "eigen");
  Potential p;
  p.kind_ = PotentialKind::eigen;
  p.R_ = R;
  p.ell_ = 1;
  p.shape_ = [q, R](double r) {
    if (r < 0.5 * R || r >= R) return 0.0;
    const auto f = q(r);
    return (f[2] - 2.0 * f[0] / (r * r)) / f[0];
  };
  p.solution_ = [q, R](double r) {
    if (r < 0.5 * R) return r * r;
    if (r >= R) return 1.0 / r;
    return q(r)[0];
  };
  return p;
}

Potential Potential::from_grid(const Grid3& g, RVector values) {
  if (values.size() != g.size()) throw std::invalid_argument("grid potential: value count mismatch");
  if (!values.allFinite()) throw std::invalid_argument("grid potential: non-finite sample");
  Potential p;
  p.kind_ = PotentialKind::grid;
  p.grid_ = g;
  p.grid_values_ = std::move(values);
  double R = 0.0;
  for (Index i = 0; i < g.size(); ++i)
    if (p.grid_values_[i] != 0.0) R = std::max(R, g.radius(i) + 0.5 * std::sqrt(3.0) * g.h());
  p.R_ = R;
  return p;
}

PotentialSplit split_samples(const Grid3& g, const RVector& V) {
  if (V.size() != g.size()) throw std::invalid_argument("split: sample count mismatch");
  PotentialSplit s;
  s.grid = g;
  s.V = V;
  s.U.resize(V.size());
  s.v.resize(V.size());
  s.w.resize(V.size());
  for (Index p = 0; p < V.size(); ++p) {
    if (!std::isfinite(V[p])) throw std::invalid_argument("split: non-finite potential sample");
    s.U[p] = V[p] >= 0.0 ? 1.0 : -1.0;
    s.v[p] = std::sqrt(std::abs(V[p]));
    s.w[p] = s.U[p] * s.v[p];
    if (s.v[p] > 0.0) s.support.push_back(p);
  }
  s.alpha = g.weight() * V.cwiseAbs().sum();
  return s;
}

PotentialSplit split_potential(const Potential& V, const Grid3& g) { return split_samples(g, V.sample(g)); }

}  // namespace tscope
