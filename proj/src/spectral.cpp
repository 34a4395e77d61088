#include "tscope/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tscope {

RMatrix spectral_laplacian_1d(int n, double h) {
  // T_jk = (1/n) sum_m k_m^2 cos(k_m (j-k) h), k_m = 2 pi m/(n h) over the FFT frequency set.
  RMatrix T(n, n);
  std::vector<double> col(static_cast<std::size_t>(n), 0.0);
  for (int d = 0; d < n; ++d) {
    double s = 0.0;
    for (int m = 0; m < n; ++m) {
      const int f = m < (n + 1) / 2 ? m : m - n;
      const double k = 2.0 * pi * f / (n * h);
      s += k * k * std::cos(2.0 * pi * f * d / n);
    }
    col[static_cast<std::size_t>(d)] = s / n;
  }
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) T(j, k) = col[static_cast<std::size_t>(std::abs(j - k))];
  return T;
}

SpectralDecomposition::SpectralDecomposition(const Grid3& g, const RVector& V, double zero_tol)
    : grid_(g), zero_tol_(zero_tol) {
  if (V.size() != g.size()) throw std::invalid_argument("SpectralDecomposition: potential size mismatch");
  const int n = g.n();
  const Index N = g.size();
  const RMatrix T = spectral_laplacian_1d(n, g.h());
  RMatrix H = RMatrix::Zero(N, N);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Index p = g.index(i, j, k);
        for (int m = 0; m < n; ++m) {
          H(p, g.index(m, j, k)) += T(i, m);
          H(p, g.index(i, m, k)) += T(j, m);
          H(p, g.index(i, j, m)) += T(k, m);
        }
        H(p, p) += V[p];
      }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(H);
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors();
  for (Index c = 0; c < evecs_.cols(); ++c) {
    Index imax = 0;
    evecs_.col(c).cwiseAbs().maxCoeff(&imax);
    if (evecs_(imax, c) < 0) evecs_.col(c) *= -1.0;
  }
  excluded_ = bound_set();
  for (Index z : zero_set()) excluded_.push_back(z);
}

std::vector<Index> SpectralDecomposition::bound_set() const {
  std::vector<Index> out;
  for (Index j = 0; j < evals_.size(); ++j)
    if (evals_[j] < -zero_tol_) out.push_back(j);
  return out;
}

std::vector<Index> SpectralDecomposition::zero_set() const {
  std::vector<Index> out;
  for (Index j = 0; j < evals_.size(); ++j)
    if (std::abs(evals_[j]) < zero_tol_) out.push_back(j);
  return out;
}

std::vector<Index> SpectralDecomposition::nearest_zero(Index count) const {
  std::vector<Index> idx(static_cast<std::size_t>(evals_.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Index a, Index b) { return std::abs(evals_[a]) < std::abs(evals_[b]); });
  idx.resize(static_cast<std::size_t>(std::min<Index>(count, evals_.size())));
  std::sort(idx.begin(), idx.end());
  return idx;
}

RMatrix SpectralDecomposition::projector(const std::vector<Index>& idx) const {
  RMatrix Q(evecs_.rows(), static_cast<Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) Q.col(static_cast<Index>(c)) = evecs_.col(idx[c]);
  return Q * Q.transpose();
}

CVector SpectralDecomposition::project_ac(const CVector& psi) const {
  CVector out = psi;
  for (Index j : excluded_) {
    const auto u = evecs_.col(j).cast<cplx>();
    out -= u * u.dot(psi);
  }
  return out;
}

std::vector<GridFunction> evolve_dense_spectral(const SpectralDecomposition& sd, const GridFunction& psi0,
                                                const std::vector<double>& times, bool ac_only) {
  if (!(psi0.grid == sd.grid())) throw std::invalid_argument("evolve_dense_spectral: grid mismatch");
  const RMatrix& Q = sd.eigenvectors();
  CVector c(Q.cols());
  c.real() = Q.transpose() * psi0.values.real();
  c.imag() = Q.transpose() * psi0.values.imag();
  if (ac_only)
    for (Index j : sd.excluded()) c[j] = 0.0;
  std::vector<GridFunction> out;
  out.reserve(times.size());
  for (double t : times) {
    CVector ct(c.size());
    for (Index j = 0; j < c.size(); ++j) ct[j] = std::exp(cplx(0.0, t * sd.eigenvalues()[j])) * c[j];
    const RVector re = Q * ct.real(), im = Q * ct.imag();
    CVector psi(re.size());
    psi.real() = re;
    psi.imag() = im;
    out.emplace_back(sd.grid(), std::move(psi));
  }
  return out;
}

double subspace_overlap(const CMatrix& A, const CMatrix& B) {
  const CMatrix M = A.adjoint() * B;
  return M.squaredNorm() / static_cast<double>(std::max(A.cols(), B.cols()));
}

}  // namespace tscope
