#include "tscope/jensen_nenciu.hpp"

#include "tscope/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace tscope {

namespace {

using LCMatrix = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;

// Eigen's rcond estimate is unreliable on an exactly zero pivot, so check the pivots first.
double lu_condition(const Eigen::PartialPivLU<CMatrix>& lu) {
  const auto d = lu.matrixLU().diagonal().cwiseAbs();
  if (d.size() > 0 && !(d.minCoeff() > 0.0)) return std::numeric_limits<double>::infinity();
  const double rc = lu.rcond();
  return rc > 0.0 && std::isfinite(rc) ? 1.0 / rc : std::numeric_limits<double>::infinity();
}

void normalise_phases(CMatrix& frame) {
  for (Index c = 0; c < frame.cols(); ++c) {
    Index imax = 0;
    frame.col(c).cwiseAbs().maxCoeff(&imax);
    const cplx ph = frame(imax, c) / std::abs(frame(imax, c));
    frame.col(c) /= ph;
  }
}

template <class Vals, class Vecs>
Projection select_kernel(const Vals& mu, const Vecs& vecs, double eps_rank, double gap_factor) {
  std::vector<Index> keep;
  Projection P;
  for (Index i = 0; i < mu.size(); ++i) {
    const double m = std::abs(mu[i]);
    if (m < eps_rank) {
      keep.push_back(i);
      P.kept_margin = std::max(P.kept_margin, m);
    } else {
      P.discarded_margin = std::min(P.discarded_margin, m);
      if (m < gap_factor * eps_rank) {
        std::ostringstream os;
        os << "kernel_projection: eigenvalue magnitude " << m << " inside the ambiguity band [" << eps_rank
           << ", " << gap_factor * eps_rank << ")";
        throw GapAmbiguity(os.str());
      }
    }
  }
  P.frame.resize(vecs.rows(), static_cast<Index>(keep.size()));
  P.kept_eigenvalues.resize(static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    P.frame.col(static_cast<Index>(c)) = vecs.col(keep[c]).template cast<cplx>();
    P.kept_eigenvalues[static_cast<Index>(c)] = mu[keep[c]];
  }
  normalise_phases(P.frame);
  return P;
}

}  // namespace

Projection projection_from_frame(CMatrix frame) {
  const CMatrix gram = frame.adjoint() * frame;
  if ((gram - CMatrix::Identity(gram.rows(), gram.cols())).norm() > 1e-10)
    throw std::invalid_argument("projection_from_frame: frame is not orthonormal");
  Projection P;
  P.frame = std::move(frame);
  return P;
}

Projection kernel_projection(const CMatrix& a0, double eps_rank, double gap_factor) {
  if (a0.rows() != a0.cols()) throw std::invalid_argument("kernel_projection: matrix not square");
  if ((a0 - a0.adjoint()).norm() > 1e-12 * std::max(1.0, a0.norm()))
    throw std::invalid_argument("kernel_projection: matrix is not self-adjoint");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (a0 + a0.adjoint()));
  return select_kernel(es.eigenvalues(), es.eigenvectors(), eps_rank, gap_factor);
}

Projection kernel_projection(const RMatrix& a0, double eps_rank, double gap_factor) {
  if (a0.rows() != a0.cols()) throw std::invalid_argument("kernel_projection: matrix not square");
  if ((a0 - a0.transpose()).norm() > 1e-12 * std::max(1.0, a0.norm()))
    throw std::invalid_argument("kernel_projection: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (a0 + a0.transpose()));
  return select_kernel(es.eigenvalues(), es.eigenvectors(), eps_rank, gap_factor);
}

double condition_estimate(const CMatrix& m) {
  if (m.size() == 0) return 1.0;
  return lu_condition(Eigen::PartialPivLU<CMatrix>(m));
}

CMatrix gamma_inverse(const OperatorFamily& fam, const Projection& S, cplx z, double* cond) {
  CMatrix m = fam.at(z);
  if (S.dim() > 0) m += S.matrix();
  Eigen::PartialPivLU<CMatrix> lu(m);
  const double c = lu_condition(lu);
  if (cond) *cond = c;
  if (!(c < max_condition)) {
    std::ostringstream os;
    os << "A(z)+S is near singular (condition estimate " << c << ") at z = " << z;
    throw NearSingular(os.str());
  }
  return lu.inverse();
}

namespace {

// a0 * F evaluated in extended precision; this is the part of A(z) F that is
// O(rounding) for an exact kernel frame and gets divided by z.
CMatrix residual_a0F(const CMatrix& a0, const CMatrix& F) {
  const LCMatrix r = a0.cast<std::complex<long double>>() * F.cast<std::complex<long double>>();
  return r.cast<cplx>();
}

CMatrix b_from_gamma(const OperatorFamily& fam, const Projection& S, cplx z, const CMatrix& gamma) {
  const CMatrix& F = S.frame;
  const CMatrix AF = fam.a1_at(z) * F + residual_a0F(fam.a0, F) / z;
  return F.adjoint() * (gamma * AF);
}

}  // namespace

CMatrix b_operator(const OperatorFamily& fam, const Projection& S, cplx z) {
  if (S.dim() == 0) throw std::invalid_argument("b_operator: projection has rank 0");
  if (z == cplx(0.0)) throw std::invalid_argument("b_operator: z must be nonzero");
  return b_from_gamma(fam, S, z, gamma_inverse(fam, S, z));
}

JNSolve jn_solve(const OperatorFamily& fam, const Projection& S, cplx z) {
  if (z == cplx(0.0)) throw std::invalid_argument("singular_inverse: z must be nonzero");
  JNSolve out;
  out.gamma = gamma_inverse(fam, S, z, &out.cond_gamma);
  if (S.dim() == 0) {
    out.inverse = out.gamma;
    out.cond_B = 1.0;
    return out;
  }
  out.B = b_from_gamma(fam, S, z, out.gamma);
  Eigen::PartialPivLU<CMatrix> lu(out.B);
  out.cond_B = lu_condition(lu);
  if (!(out.cond_B < max_condition)) {
    std::ostringstream os;
    os << "B(z) is not invertible on range(S) (condition estimate " << out.cond_B << ")";
    throw BNotInvertible(os.str());
  }
  const CMatrix GF = out.gamma * S.frame;
  const CMatrix FG = S.frame.adjoint() * out.gamma;
  out.inverse = out.gamma + (GF * lu.solve(FG)) / z;
  return out;
}

CMatrix singular_inverse(const OperatorFamily& fam, const Projection& S, cplx z) {
  return jn_solve(fam, S, z).inverse;
}

CMatrix duality_D(const OperatorFamily& fam, const Projection& S, cplx z) {
  const CMatrix inv = singular_inverse(fam, S, z);
  const CMatrix& F = S.frame;
  return z * (CMatrix::Identity(S.dim(), S.dim()) + F.adjoint() * inv * F);
}

}  // namespace tscope
