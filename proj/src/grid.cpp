#include "tscope/grid.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace tscope {

int worker_count() {
  int cap = omp_get_max_threads();
  if (const char* env = std::getenv("THRESHOLD_SCOPE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0 && v < cap) cap = v;
  }
  return cap < 1 ? 1 : cap;
}

Grid3::Grid3(int n, double L) : n_(n), L_(L), h_(2.0 * L / n) {}

Point3 Grid3::point(Index p) const {
  const Index k = p % n_;
  const Index j = (p / n_) % n_;
  const Index i = p / (static_cast<Index>(n_) * n_);
  return {coord(static_cast<int>(i)), coord(static_cast<int>(j)), coord(static_cast<int>(k))};
}

double Grid3::radius(Index p) const {
  const auto x = point(p);
  return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

Index Grid3::mirror(Index p) const {
  const Index k = p % n_;
  const Index j = (p / n_) % n_;
  const Index i = p / (static_cast<Index>(n_) * n_);
  return index(n_ - 1 - static_cast<int>(i), n_ - 1 - static_cast<int>(j), n_ - 1 - static_cast<int>(k));
}

Grid3 build_grid(int n, double L) {
  if (n < 4) throw std::invalid_argument("build_grid: n must be at least 4, got " + std::to_string(n));
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("build_grid: L must be positive");
  return Grid3(n, L);
}

GridFunction::GridFunction(Grid3 g, CVector v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw std::invalid_argument("GridFunction: value count mismatch");
  if (!values.allFinite()) throw std::invalid_argument("GridFunction: non-finite entry");
}

double cell_self_integral() {
  // The cube splits into six pyramids over its faces; on each, the radial
  // integral of r^2/r is R^2/2, leaving a face integral whose inner variable
  // integrates in closed form.
  static const double value = [] {
    auto inner = [](double y) {
      const double c = 0.25 + y * y;
      return 2.0 * std::asinh(0.5 / std::sqrt(c));
    };
    double err = 0.0;
    const double face = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(inner, -0.5, 0.5, 15,
                                                                                     1e-14, &err);
    return 6.0 * 0.25 * face / (4.0 * pi);
  }();
  return value;
}

double gj_entry(const Grid3& g, int j, double r, bool same) {
  const double w = g.weight();
  switch (j) {
    case 0: return same ? g.h() * g.h() * cell_self_integral() : w / (4.0 * pi * r);
    case 1: return w / (4.0 * pi);
    case 2: return same ? 0.0 : w * r / (8.0 * pi);
    case 3: return same ? 0.0 : w * r * r / (24.0 * pi);
    default: throw std::invalid_argument("gj kernel index must be 0..3");
  }
}

cplx resolvent_entry(const Grid3& g, double lambda, double r, bool same) {
  if (same) return {g.h() * g.h() * cell_self_integral(), lambda * g.weight() / (4.0 * pi)};
  return g.weight() * std::exp(cplx(0.0, lambda * r)) / (4.0 * pi * r);
}

std::vector<Index> all_indices(const Grid3& g) {
  std::vector<Index> idx(static_cast<std::size_t>(g.size()));
  for (Index p = 0; p < g.size(); ++p) idx[static_cast<std::size_t>(p)] = p;
  return idx;
}

namespace {

template <class Mat, class F>
Mat fill_block(const Grid3& g, const std::vector<Index>& rows, const std::vector<Index>& cols, F entry) {
  const Index nr = static_cast<Index>(rows.size()), nc = static_cast<Index>(cols.size());
  Mat m(nr, nc);
  std::vector<Point3> cp(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) cp[c] = g.point(cols[c]);
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (Index a = 0; a < nr; ++a) {
    const Point3 x = g.point(rows[static_cast<std::size_t>(a)]);
    for (Index b = 0; b < nc; ++b) {
      const bool same = rows[static_cast<std::size_t>(a)] == cols[static_cast<std::size_t>(b)];
      m(a, b) = entry(same ? 0.0 : distance(x, cp[static_cast<std::size_t>(b)]), same);
    }
  }
  return m;
}

}  // namespace

RMatrix gj_block(const Grid3& g, int j, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  if (j < 0 || j > 3) throw std::invalid_argument("gj kernel index must be 0..3");
  return fill_block<RMatrix>(g, rows, cols, [&](double r, bool same) { return gj_entry(g, j, r, same); });
}

CMatrix resolvent_block(const Grid3& g, double lambda, const std::vector<Index>& rows,
                        const std::vector<Index>& cols) {
  if (!std::isfinite(lambda)) throw std::invalid_argument("resolvent: non-finite lambda");
  return fill_block<CMatrix>(g, rows, cols,
                             [&](double r, bool same) { return resolvent_entry(g, lambda, r, same); });
}

KernelMatrix build_gj_kernel(const Grid3& g, int j) {
  const auto idx = all_indices(g);
  KernelMatrix k{g, KernelKind::Gj, j, 0.0, gj_block(g, j, idx, idx).cast<cplx>(), ""};
  k.diagonal_rule = j == 0 ? "cell-average h^2*I0" : (j == 1 ? "formula (|0|^0 = 1)" : "formula (zero)");
  return k;
}

KernelMatrix build_free_resolvent_plus(const Grid3& g, double lambda) {
  const auto idx = all_indices(g);
  return {g, KernelKind::FreeResolventPlus, 0, lambda, resolvent_block(g, lambda, idx, idx),
          "cell-average h^2*I0 + i*lambda*h^3/(4pi)"};
}

}  // namespace tscope
