#include "tscope/birman_schwinger.hpp"

#include <cmath>
#include <stdexcept>

namespace tscope {

cplx expm1_over_x(double x) {
  if (x == 0.0) return {0.0, 1.0};
  const double y = 0.5 * x;
  return cplx(0.0, 1.0) * std::exp(cplx(0.0, y)) * (std::sin(y) / y);
}

cplx expm1_minus_ix_over_x2(double x) {
  if (std::abs(x) < 0.5) {
    // sum_{k>=2} (ix)^k / k! / x^2
    cplx sum(0.0, 0.0);
    const cplx ix(0.0, x);
    double fact = 1.0;
    cplx pw(-1.0, 0.0);  // (ix)^2 / x^2
    for (int k = 2; k < 22; ++k) {
      fact *= k;
      sum += pw / fact;
      pw *= ix;
    }
    return sum;
  }
  return (std::exp(cplx(0.0, x)) - 1.0 - cplx(0.0, x)) / (x * x);
}

BirmanSchwingerFamily::BirmanSchwingerFamily(PotentialSplit split) : split_(std::move(split)) {
  const auto& g = split_.grid;
  const Index m = dim();
  v_.resize(m);
  U_.resize(m);
  std::vector<Point3> pts(static_cast<std::size_t>(m));
  for (Index a = 0; a < m; ++a) {
    const Index p = split_.support[static_cast<std::size_t>(a)];
    v_[a] = split_.v[p];
    U_[a] = split_.U[p];
    pts[static_cast<std::size_t>(a)] = g.point(p);
  }
  dist_.resize(m, m);
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b) dist_(a, b) = a == b ? 0.0 : distance(pts[a], pts[b]);
  A0_ = vGjv(0);
  A0_.diagonal() += U_;
}

RMatrix BirmanSchwingerFamily::vGjv(int j) const {
  const auto& g = grid();
  const Index m = dim();
  RMatrix out(m, m);
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b) out(a, b) = v_[a] * gj_entry(g, j, dist_(a, b), a == b) * v_[b];
  return out;
}

CMatrix BirmanSchwingerFamily::A1(double lambda) const {
  const double c = grid().weight() / (4.0 * pi);
  const Index m = dim();
  CMatrix out(m, m);
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b) out(a, b) = c * v_[a] * v_[b] * expm1_over_x(lambda * dist_(a, b));
  return out;
}

CMatrix BirmanSchwingerFamily::A2(double lambda) const {
  const double c = grid().weight() / (4.0 * pi);
  const Index m = dim();
  CMatrix out(m, m);
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b) {
      const double r = dist_(a, b);
      out(a, b) = c * v_[a] * v_[b] * r * expm1_minus_ix_over_x2(lambda * r);
    }
  return out;
}

CMatrix BirmanSchwingerFamily::A(double lambda) const {
  CMatrix out = A0_.cast<cplx>();
  out += lambda * A1(lambda);
  return out;
}

CMatrix BirmanSchwingerFamily::A2_prime0() const { return cplx(0.0, -1.0) * vGjv(3).cast<cplx>(); }

CMatrix BirmanSchwingerFamily::embed(const CMatrix& block, bool with_U_outside) const {
  const Index N = grid().size();
  if (block.rows() != dim() || block.cols() != dim()) throw std::invalid_argument("embed: block size mismatch");
  CMatrix out = CMatrix::Zero(N, N);
  if (with_U_outside)
    for (Index p = 0; p < N; ++p) out(p, p) = split_.U[p];
  const auto& s = split_.support;
  for (Index a = 0; a < dim(); ++a)
    for (Index b = 0; b < dim(); ++b) out(s[a], s[b]) = block(a, b);
  return out;
}

}  // namespace tscope
