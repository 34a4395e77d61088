#include "tscope/threshold.hpp"

#include "tscope/errors.hpp"
#include "tscope/fit.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <sstream>

namespace tscope {

std::string to_string(ThresholdClass c) {
  switch (c) {
    case ThresholdClass::regular: return "regular";
    case ThresholdClass::resonance_only: return "resonance_only";
    case ThresholdClass::eigenvalue_only: return "eigenvalue_only";
    case ThresholdClass::resonance_and_eigenvalue: return "resonance_and_eigenvalue";
  }
  return "unknown";
}

namespace {

const cplx I(0.0, 1.0);

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

ThresholdData::ThresholdData(std::shared_ptr<const BirmanSchwingerFamily> family, const ThresholdOptions& opt)
    : family_(std::move(family)) {
  const auto& fam = *family_;
  const Index n = fam.dim();
  a0d_ = fam.A0();
  if (n == 0) {
    eps_rank_ = opt.eps_rank > 0 ? opt.eps_rank : opt.rel_eps;
    s1_.frame.resize(0, 0);
    s2_.frame.resize(0, 0);
    lambda0_ = opt.lambda0 > 0 ? opt.lambda0 : 0.5 / grid().L();
    lambda0_cond_ = 1.0;
    return;
  }
  if (opt.eps_rank > 0) {
    eps_rank_ = opt.eps_rank;
  } else {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(fam.A0(), Eigen::EigenvaluesOnly);
    eps_rank_ = opt.rel_eps * es.eigenvalues().cwiseAbs().maxCoeff();
  }
  s1_ = kernel_projection(fam.A0(), eps_rank_, opt.gap_factor);
  const Index r1 = s1_.dim();
  const RMatrix E1r = s1_.frame.real();
  a0d_ -= E1r * s1_.kept_eigenvalues.asDiagonal() * E1r.transpose();

  s2_.frame.resize(r1, 0);
  if (r1 > 0) {
    const CMatrix& E1 = s1_.frame;
    m0_ = E1.adjoint() * fam.A1(0.0) * E1;
    eps_rank2_ = opt.rel_eps * split().alpha / (4.0 * pi);
    s2_ = kernel_projection(hermitian_part(-I * m0_), eps_rank2_, opt.gap_factor);
    if (r1 - s2_.dim() > 1) throw std::logic_error("m(0) has rank above one");
    if (s2_.dim() > 0) {
      const CMatrix& F2 = s2_.frame;
      b0_ = F2.adjoint() * m1_0() * F2;
      Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(b0_), Eigen::EigenvaluesOnly);
      b0_min_eig_ = es.eigenvalues()[0];
    }
  }
  select_lambda0(opt);
}

OperatorFamily ThresholdData::level1() const {
  auto fam = family_;
  return OperatorFamily{a0d_.cast<cplx>(), [fam](cplx z) { return fam->A1(z.real()); }, true};
}

CMatrix ThresholdData::gamma1_at(double lambda) const { return gamma_inverse(level1(), s1_, lambda); }

CMatrix ThresholdData::m1_at(double lambda, const CMatrix& gamma1) const {
  const CMatrix& E1 = s1_.frame;
  const CMatrix A1E = family_->A1(lambda) * E1;
  const CMatrix EA1 = E1.adjoint() * family_->A1(lambda);
  return E1.adjoint() * family_->A2(lambda) * E1 - EA1 * gamma1 * A1E;
}

CMatrix ThresholdData::m_at(double lambda) const { return b_operator(level1(), s1_, lambda); }

CMatrix ThresholdData::b_at(double lambda) const {
  if (s2_.dim() == 0) throw std::logic_error("b(lambda) needs rank(S2) >= 1");
  return evaluate(lambda).b;
}

LevelEval ThresholdData::evaluate(double lambda) const {
  if (lambda == 0.0) throw std::invalid_argument("ThresholdData::evaluate at lambda = 0");
  LevelEval ev;
  ev.gamma1 = gamma1_at(lambda);
  if (s1_.dim() == 0) {
    ev.inverse = ev.gamma1;
    return ev;
  }
  const CMatrix& E1 = s1_.frame;
  ev.m1 = m1_at(lambda, ev.gamma1);
  ev.m = m0_ + lambda * ev.m1;
  const CMatrix m1 = ev.m1;
  const OperatorFamily level2{m0_, [m1](cplx) { return m1; }, false};
  const JNSolve jn = jn_solve(level2, s2_, lambda);
  ev.gamma2 = jn.gamma;
  ev.b = jn.B;
  const CMatrix GE = ev.gamma1 * E1;
  const CMatrix EG = E1.adjoint() * ev.gamma1;
  ev.inverse = ev.gamma1 + GE * jn.inverse * EG / lambda;
  return ev;
}

CMatrix ThresholdData::direct_inverse(double lambda) const {
  const CMatrix A = a0d_.cast<cplx>() + lambda * family_->A1(lambda);
  return A.partialPivLu().inverse();
}

CMatrix ThresholdData::gamma1_0() const {
  RMatrix m = a0d_;
  if (s1_.dim() > 0) m += (s1_.frame * s1_.frame.adjoint()).real();
  return m.partialPivLu().inverse().cast<cplx>();
}

CMatrix ThresholdData::m1_0() const { return m1_at(0.0, gamma1_0()); }

void ThresholdData::select_lambda0(const ThresholdOptions& opt) {
  const bool fixed = opt.lambda0 > 0;
  double lambda = fixed ? opt.lambda0 : 0.5 / grid().L();
  auto worst_condition = [&](double lam) {
    double worst = 1.0;
    for (int j = 0; j < 4; ++j) {
      const double l = lam * std::ldexp(1.0, -j);
      double c = 0.0;
      const CMatrix g1 = gamma_inverse(level1(), s1_, l, &c);
      worst = std::max(worst, c);
      if (s1_.dim() > 0) {
        const CMatrix m1 = m1_at(l, g1);
        const OperatorFamily level2{m0_, [m1](cplx) { return m1; }, false};
        const JNSolve jn = jn_solve(level2, s2_, l);
        worst = std::max({worst, jn.cond_gamma, jn.cond_B});
      }
    }
    return worst;
  };
  while (lambda >= 1e-6) {
    double c = std::numeric_limits<double>::infinity();
    try {
      c = worst_condition(lambda);
    } catch (const ConditioningFailure&) {
    }
    if (c < opt.lambda0_condition_limit) {
      lambda0_ = lambda;
      lambda0_cond_ = c;
      return;
    }
    if (fixed) break;
    lambda *= 0.5;
  }
  std::ostringstream os;
  os << "no admissible lambda0 >= 1e-6 (condition limit " << opt.lambda0_condition_limit << ")";
  throw ConditioningFailure(os.str());
}

ThresholdData compute_threshold_data(const PotentialSplit& split, const ThresholdOptions& opt) {
  return ThresholdData(std::make_shared<const BirmanSchwingerFamily>(split), opt);
}

Classification classify_threshold(const ThresholdData& td) {
  Classification c;
  c.rank_s1 = td.s1().dim();
  c.rank_s2 = td.s2().dim();
  c.kept_margin_s1 = td.s1().kept_margin;
  c.discarded_margin_s1 = td.s1().discarded_margin;
  c.kept_margin_s2 = td.s2().kept_margin;
  c.discarded_margin_s2 = td.s2().discarded_margin;
  const bool resonance = c.rank_s1 > c.rank_s2;
  const bool eigen = c.rank_s2 > 0;
  if (resonance && eigen) c.cls = ThresholdClass::resonance_and_eigenvalue;
  else if (resonance) c.cls = ThresholdClass::resonance_only;
  else if (eigen) c.cls = ThresholdClass::eigenvalue_only;
  return c;
}

LaurentExpansion laurent_of_A_inverse(const ThresholdData& td) {
  LaurentExpansion L;
  const Index n = td.family().dim();
  L.radius = td.lambda0();
  L.c_minus2 = CMatrix::Zero(n, n);
  L.c_minus1 = CMatrix::Zero(n, n);
  const Index r1 = td.s1().dim(), r2 = td.s2().dim();
  if (r1 > 0) {
    const auto& fam = td.family();
    const CMatrix& E1 = td.s1().frame;
    const CMatrix G1 = td.gamma1_0();
    const CMatrix A1 = fam.A1(0.0);
    const CMatrix A2 = fam.A2(0.0);
    const CMatrix m1 = td.m1_0();
    const CMatrix& F2 = td.s2().frame;
    const CMatrix G2 = (td.m0() + F2 * F2.adjoint()).partialPivLu().inverse();
    L.c_minus1 = E1 * G2 * E1.adjoint();
    if (r2 > 0) {
      // Derivatives at 0 of Gamma1, Gamma2, m1 and b; the lambda^-1
      // coefficient picks up d/dl of Gamma1 E1 Gamma2 F2 b^-1 F2* Gamma2 E1* Gamma1.
      const CMatrix G1p = -G1 * A1 * G1;
      const CMatrix G2p = -G2 * m1 * G2;
      const CMatrix m1p = E1.adjoint() * (fam.A2_prime0() - A2 * G1 * A1 - A1 * G1p * A1 - A1 * G1 * A2) * E1;
      const CMatrix bp = F2.adjoint() * m1p * F2 - F2.adjoint() * m1 * G2 * m1 * F2;
      const CMatrix binv = td.b0().partialPivLu().inverse();
      const CMatrix W0 = F2 * binv * F2.adjoint();
      const CMatrix Wp = G2p * W0 + W0 * G2p - F2 * binv * bp * binv * F2.adjoint();
      const CMatrix C2 = E1 * W0 * E1.adjoint();
      L.c_minus2 = C2;
      L.c_minus1 += G1p * C2 + C2 * G1p + E1 * Wp * E1.adjoint();
    }
  }
  const ThresholdData copy = td;
  const CMatrix c2 = L.c_minus2, c1 = L.c_minus1;
  L.regular_at = [copy, c2, c1](double lambda) -> CMatrix {
    return copy.inverse_at(lambda) - c2 / (lambda * lambda) - c1 / lambda;
  };
  return L;
}

GridFunction resonance_function(const ThresholdData& td, const CVector& f) {
  const auto& fam = td.family();
  if (f.size() != fam.dim()) throw std::invalid_argument("resonance_function: vector size mismatch");
  const CMatrix& E1 = td.s1().frame;
  const double fn = f.norm();
  if (fn == 0.0) return GridFunction(td.grid());
  if (td.s1().dim() == 0 || (f - E1 * (E1.adjoint() * f)).norm() > 1e-6 * fn)
    throw std::invalid_argument("resonance_function: f is not in range(S1)");
  const auto& g = td.grid();
  const RMatrix G0 = gj_block(g, 0, all_indices(g), td.split().support);
  const CVector vf = fam.v_support().cast<cplx>().cwiseProduct(f);
  return GridFunction(g, -(G0.cast<cplx>() * vf));
}

P0Data compute_P0(const ThresholdData& td) {
  if (td.s2().dim() == 0) throw EmptySubspace("compute_P0: rank(S2) = 0");
  const auto& g = td.grid();
  const auto& fam = td.family();
  const CMatrix E2 = td.s2_support_frame();
  const RMatrix G0 = gj_block(g, 0, all_indices(g), td.split().support);
  P0Data d;
  d.phi = -(G0.cast<cplx>() * (fam.v_support().cast<cplx>().asDiagonal() * E2));
  d.gram = d.phi.adjoint() * d.phi;
  const CMatrix ginv = d.gram.partialPivLu().inverse();
  d.p0 = d.phi * ginv * d.phi.adjoint();
  d.gram_vs_b0 = (d.gram - td.b0()).norm() / td.b0().norm();
  return d;
}

CMatrix rv_block(const ThresholdData& td, double lambda, const std::vector<Index>& rows,
                 const std::vector<Index>& cols, const CMatrix* inverse) {
  const auto& g = td.grid();
  CMatrix out = resolvent_block(g, lambda, rows, cols);
  if (td.family().dim() == 0) return out;
  CMatrix inv;
  if (inverse) inv = *inverse;
  else if (lambda == 0.0 && td.s1().dim() == 0) inv = td.direct_inverse(0.0);
  else inv = td.inverse_at(lambda);
  const auto& S = td.split().support;
  const CVector v = td.family().v_support().cast<cplx>();
  const CMatrix left = resolvent_block(g, lambda, rows, S) * v.asDiagonal();
  const CMatrix right = v.asDiagonal() * resolvent_block(g, lambda, S, cols);
  out -= left * inv * right;
  return out;
}

CMatrix assemble_RV_plus(const ThresholdData& td, double lambda) {
  const auto idx = all_indices(td.grid());
  return rv_block(td, lambda, idx, idx);
}

JumpFit spectral_jump_exponent(const ThresholdData& td, const std::vector<double>& energies) {
  JumpFit fit;
  const double top = td.lambda0() * td.lambda0();
  for (double E : energies) {
    if (!(E > 0.0 && E < top)) continue;
    const CMatrix R = assemble_RV_plus(td, std::sqrt(E));
    const RMatrix imR = 0.5 * (R.imag() + R.imag().transpose());
    Eigen::SelfAdjointEigenSolver<RMatrix> es(imR, Eigen::EigenvaluesOnly);
    fit.energies.push_back(E);
    fit.norms.push_back(2.0 * es.eigenvalues().cwiseAbs().maxCoeff());
  }
  if (fit.energies.size() < 4) throw std::invalid_argument("spectral_jump_exponent: fewer than 4 usable samples");
  const LineFit lf = fit_loglog(fit.energies, fit.norms);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.residual = lf.rms_residual;
  return fit;
}

GridTuning tune_on_grid(const Potential& W, const Grid3& g, double c_lo, double c_hi) {
  if (!(c_lo > 0.0 && c_hi > c_lo)) throw std::invalid_argument("tune_on_grid: need 0 < c_lo < c_hi");
  const PotentialSplit s = split_potential(W.with_coupling(1.0), g);
  const BirmanSchwingerFamily fam(s);
  const RMatrix K = fam.A0() - RMatrix(fam.U_support().asDiagonal());
  GridTuning t;
  auto mu = [&](double c) {
    ++t.evaluations;
    RMatrix A = c * K;
    A.diagonal() += fam.U_support();
    Eigen::SelfAdjointEigenSolver<RMatrix> es(A, Eigen::EigenvaluesOnly);
    Index i = 0;
    es.eigenvalues().cwiseAbs().minCoeff(&i);
    return es.eigenvalues()[i];
  };
  const double flo = mu(c_lo), fhi = mu(c_hi);
  if (!(flo * fhi < 0.0)) throw std::invalid_argument("tune_on_grid: bracket does not straddle a zero eigenvalue");
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(mu, c_lo, c_hi, flo, fhi,
                                                   boost::math::tools::eps_tolerance<double>(50), iters);
  const double a = mu(r.first), b = mu(r.second);
  t.coupling = std::abs(a) <= std::abs(b) ? r.first : r.second;
  t.mu = std::min(std::abs(a), std::abs(b));
  return t;
}

}  // namespace tscope
