#include "tscope/lambda_quadrature.hpp"

#include "tscope/errors.hpp"
#include "tscope/fit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace tscope {

namespace {

const cplx I(0.0, 1.0);

using Weights = std::function<void(double, CVector&)>;

struct ChirpResult {
  CVector value;
  double change = 0.0;
  int panels = 0;
};

// Integral over [lo, hi] of e^{i T s^2} chi(s) w_k(s) ds for m weights by composite
// Gauss-Legendre panels, doubled until successive results agree.
ChirpResult chirp_integrate(double T, double lo, double hi, int m, const Weights& w, double extra_rate,
                            const QuadratureOptions& opt) {
  const auto& gr = gauss_rule();
  const double span = hi - lo;
  const double phase = span * (2.0 * T * std::max(std::abs(lo), std::abs(hi)) + extra_rate);
  int panels = std::max(8, static_cast<int>(std::ceil(phase / pi)));
  auto run = [&](int P) {
    CVector acc = CVector::Zero(m);
    CVector wk(m);
    const double width = span / P;
    for (int p = 0; p < P; ++p) {
      const double a = lo + p * width;
      for (std::size_t k = 0; k < gr.x.size(); ++k) {
        const double s = a + 0.5 * width * (gr.x[k] + 1.0);
        const double c = CutoffSpec::profile(s)[0];
        if (c == 0.0) continue;
        w(s, wk);
        acc += (0.5 * width * gr.w[k] * c) * std::exp(I * (T * s * s)) * wk;
      }
    }
    return acc;
  };
  CVector prev = run(panels);
  while (true) {
    if (panels > (1 << 23)) throw QuadratureFailure("chirp quadrature did not converge");
    panels *= 2;
    CVector next = run(panels);
    const double change = (next - prev).cwiseAbs().maxCoeff();
    if (change <= opt.tolerance) return {next, change, panels};
    prev = std::move(next);
  }
}

void check_budget(double t, double lambda0, const QuadratureOptions& opt) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("time must be positive and finite");
  const double osc = oscillation_count(t, lambda0);
  if (osc > opt.max_oscillations) {
    std::ostringstream os;
    os << "oscillation budget exceeded: t lambda0^2/(2 pi) = " << osc << " > " << opt.max_oscillations;
    throw QuadratureFailure(os.str());
  }
}

// Chebyshev polynomials T_0..T_{n-1} at s.
void chebyshev_values(double s, CVector& out) {
  const Index n = out.size();
  if (n > 0) out[0] = 1.0;
  if (n > 1) out[1] = s;
  for (Index k = 2; k < n; ++k) out[k] = 2.0 * s * out[k - 1] - out[k - 2];
}

// Free-space kernel e^{-i a^2/4t}/(4 pi a), quadrature weighted; the cell self-integral at a = 0.
CMatrix chirped_block(const Grid3& g, double t, bool limit, const std::vector<Index>& rows,
                      const std::vector<Index>& cols) {
  CMatrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  const double w = g.weight();
  const double self = g.h() * g.h() * cell_self_integral();
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (Index i = 0; i < out.rows(); ++i) {
    const auto x = g.point(rows[i]);
    for (Index j = 0; j < out.cols(); ++j) {
      if (rows[i] == cols[j]) {
        out(i, j) = self;
        continue;
      }
      const double a = distance(x, g.point(cols[j]));
      const cplx phase = limit ? cplx(1.0) : std::exp(-I * (a * a / (4.0 * t)));
      out(i, j) = w * phase / (4.0 * pi * a);
    }
  }
  return out;
}

}  // namespace

CVector ChebyshevSeries::operator()(double s) const {
  const Index n = coeffs.rows();
  CVector b1 = CVector::Zero(coeffs.cols()), b2 = CVector::Zero(coeffs.cols());
  for (Index k = n - 1; k >= 1; --k) {
    CVector b0 = coeffs.row(k).transpose() + 2.0 * s * b1 - b2;
    b2 = std::move(b1);
    b1 = std::move(b0);
  }
  return coeffs.row(0).transpose() + s * b1 - b2;
}

ChebyshevSeries chebyshev_interpolate(const std::function<CVector(double)>& f, int n, bool odd_conjugate) {
  if (n < 2 || (odd_conjugate && n % 2 != 0)) throw std::invalid_argument("chebyshev_interpolate: bad node count");
  std::vector<double> s(n);
  for (int j = 0; j < n; ++j) s[j] = std::cos(pi * (j + 0.5) / n);
  const int direct = odd_conjugate ? n / 2 : n;
  std::vector<CVector> vals(n);
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (int j = 0; j < direct; ++j) vals[j] = f(s[j]);
  for (int j = direct; j < n; ++j) vals[j] = -vals[n - 1 - j].conjugate();
  const Index m = vals[0].size();
  ChebyshevSeries out;
  out.coeffs = CMatrix::Zero(n, m);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) out.coeffs.row(k) += std::cos(pi * k * (j + 0.5) / n) * vals[j].transpose();
    out.coeffs.row(k) *= (k == 0 ? 1.0 : 2.0) / n;
  }
  return out;
}

double oscillation_count(double t, double lambda0) { return t * lambda0 * lambda0 / (2.0 * pi); }

CVector chirp_moments(const CutoffSpec& cutoff, double t, int n, const QuadratureOptions& opt) {
  check_budget(t, cutoff.lambda0(), opt);
  const double T = t * cutoff.lambda0() * cutoff.lambda0();
  // Even moments only; odd ones vanish by symmetry.
  const int half = (n + 1) / 2;
  CVector tk(2 * half);
  const Weights w = [&tk, half](double s, CVector& out) {
    chebyshev_values(s, tk);
    for (int k = 0; k < half; ++k) out[k] = tk[2 * k];
  };
  const ChirpResult r = chirp_integrate(T, 0.0, 1.0, half, w, 0.0, opt);
  CVector M = CVector::Zero(n);
  for (int k = 0; k < half; ++k) M[2 * k] = 2.0 * cutoff.lambda0() * r.value[k];
  return M;
}

cplx h_limit() { return std::sqrt(pi) * std::exp(I * (0.25 * pi)); }

HofT h_lambda_route(const CutoffSpec& cutoff, double t, const QuadratureOptions& opt) {
  check_budget(t, cutoff.lambda0(), opt);
  const double T = t * cutoff.lambda0() * cutoff.lambda0();
  const Weights one = [](double, CVector& out) { out[0] = 1.0; };
  const ChirpResult r = chirp_integrate(T, 0.0, 1.0, 1, one, 0.0, opt);
  // sqrt(t) * lambda0 * 2 * integral_0^1 = 2 sqrt(T) * integral_0^1.
  return {2.0 * std::sqrt(T) * r.value[0], 2.0 * std::sqrt(T) * r.change, false};
}

namespace {

struct HatTable {
  std::vector<double> xi, w, hat;
};

// chi^ on Gauss-Legendre panels of the given width over [0, 400]; chi^ is below 1e-12 past 400.
const HatTable& hat_table(int refinement) {
  static const std::array<HatTable, 2> tables = [] {
    std::array<HatTable, 2> out;
    const auto& gr = gauss_rule();
    const double xi_max = 400.0;
    for (int r = 0; r < 2; ++r) {
      const double width = r == 0 ? 2.0 : 1.0;
      const int P = static_cast<int>(xi_max / width);
      auto& tab = out[r];
      tab.xi.resize(static_cast<std::size_t>(P) * gr.x.size());
      tab.w.resize(tab.xi.size());
      tab.hat.resize(tab.xi.size());
      for (int p = 0; p < P; ++p)
        for (std::size_t k = 0; k < gr.x.size(); ++k) {
          const std::size_t q = p * gr.x.size() + k;
          tab.xi[q] = p * width + 0.5 * width * (gr.x[k] + 1.0);
          tab.w[q] = 0.5 * width * gr.w[k];
        }
#pragma omp parallel for schedule(dynamic, 64) num_threads(worker_count())
      for (std::size_t q = 0; q < tab.xi.size(); ++q) tab.hat[q] = CutoffSpec::profile_hat(tab.xi[q]);
    }
    return out;
  }();
  return tables[refinement];
}

}  // namespace

HofT h_u_route(const CutoffSpec& cutoff, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("time must be positive and finite");
  const double T = t * cutoff.lambda0() * cutoff.lambda0();
  const cplx pre = std::exp(I * (0.25 * pi)) / std::sqrt(pi);
  cplx vals[2];
  for (int r = 0; r < 2; ++r) {
    const auto& tab = hat_table(r);
    cplx acc = 0.0;
    for (std::size_t q = 0; q < tab.xi.size(); ++q)
      acc += tab.w[q] * tab.hat[q] * std::exp(-I * (tab.xi[q] * tab.xi[q] / (4.0 * T)));
    vals[r] = pre * acc;
  }
  return {vals[1], std::abs(vals[1] - vals[0]), true};
}

HofT compute_h_of_t(const CutoffSpec& cutoff, double t, const QuadratureOptions& opt) {
  const double T = t * cutoff.lambda0() * cutoff.lambda0();
  const HofT h = T < 100.0 ? h_lambda_route(cutoff, t, opt) : h_u_route(cutoff, t);
  if (h.refinement_change > 1e-8) throw QuadratureFailure("h(t): refinements disagree");
  return h;
}

cplx chirp_shift(const CutoffSpec& cutoff, double t, double a, const QuadratureOptions& opt) {
  check_budget(t, cutoff.lambda0(), opt);
  const double l0 = cutoff.lambda0();
  const double T = t * l0 * l0;
  const Weights w = [a, l0](double s, CVector& out) { out[0] = std::exp(I * (a * l0 * s)); };
  const ChirpResult r = chirp_integrate(T, -1.0, 1.0, 1, w, std::abs(a) * l0, opt);
  return std::sqrt(t) * l0 * r.value[0];
}

C2Check check_c2_bound(const CutoffSpec& cutoff, const std::vector<double>& times, const std::vector<double>& shifts) {
  C2Check c;
  c.times = times;
  c.shifts = shifts;
  c.ratio = RMatrix::Zero(static_cast<Index>(times.size()), static_cast<Index>(shifts.size()));
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const cplx h = compute_h_of_t(cutoff, t).value;
    for (std::size_t j = 0; j < shifts.size(); ++j) {
      const double a = shifts[j];
      const cplx c2 = chirp_shift(cutoff, t, a) - std::exp(-I * (a * a / (4.0 * t))) * h;
      c.ratio(i, j) = std::abs(c2) * t / std::abs(a);
    }
  }
  c.max_ratio = c.ratio.size() ? c.ratio.maxCoeff() : 0.0;
  return c;
}

JTable::JTable(const CutoffSpec& cutoff, double t, double s_max, const QuadratureOptions& opt) : s_max_(s_max) {
  if (!(s_max > 0.0)) throw std::invalid_argument("JTable: s_max must be positive");
  check_budget(t, cutoff.lambda0(), opt);
  const double l0 = cutoff.lambda0();
  const double T = t * l0 * l0;
  // J at many shifts at once: sqrt(t) * 2 * integral_0^1 e^{iT s^2} chi(s) sin(l0 s q)/s ds.
  auto evaluate = [&](const std::vector<double>& q) {
    const int m = static_cast<int>(q.size());
    const Weights w = [&q, l0, m](double s, CVector& out) {
      for (int k = 0; k < m; ++k) out[k] = s == 0.0 ? l0 * q[k] : std::sin(l0 * s * q[k]) / s;
    };
    return (2.0 * std::sqrt(t) * chirp_integrate(T, 0.0, 1.0, m, w, l0 * s_max, opt).value).eval();
  };
  const std::vector<double> checks = {0.07, 0.31, 0.52, 0.73, 0.96};
  std::vector<double> qc;
  for (double c : checks) qc.push_back(c * s_max);
  const CVector jc = evaluate(qc);
  for (int n = 24; n <= 192; n *= 2) {
    std::vector<double> q(n);
    for (int j = 0; j < n; ++j) q[j] = 0.5 * s_max * (1.0 + std::cos(pi * (j + 0.5) / n));
    const CVector vals = evaluate(q);
    series_.coeffs = CMatrix::Zero(n, 1);
    for (int k = 0; k < n; ++k) {
      cplx acc = 0.0;
      for (int j = 0; j < n; ++j) acc += std::cos(pi * k * (j + 0.5) / n) * vals[j];
      series_.coeffs(k, 0) = acc * ((k == 0 ? 1.0 : 2.0) / n);
    }
    double err = 0.0;
    for (std::size_t c = 0; c < checks.size(); ++c) err = std::max(err, std::abs((*this)(qc[c]) - jc[c]));
    residual_ = err / std::max(1e-300, vals.cwiseAbs().maxCoeff());
    if (residual_ < 1e-9) return;
  }
  throw QuadratureFailure("J(t, s) table did not reach its interpolation tolerance");
}

cplx JTable::operator()(double s) const { return series_(2.0 * s / s_max_ - 1.0)[0]; }

std::vector<SamplePair> stratified_pairs(const PotentialSplit& split, int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample pair count must be positive");
  const auto& g = split.grid;
  std::vector<Index> candidates;
  for (Index p = 0; p < g.size(); ++p)
    if (split.v[p] == 0.0) candidates.push_back(p);
  if (candidates.size() < 2) throw std::invalid_argument("no off-support grid points to sample");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  struct Draw {
    double s;
    SamplePair p;
  };
  std::vector<Draw> draws;
  const std::size_t total = 20 * static_cast<std::size_t>(count);
  while (draws.size() < total) {
    const Index x = candidates[pick(rng)], y = candidates[pick(rng)];
    if (x == y) continue;
    draws.push_back({g.radius(x) + g.radius(y), {x, y}});
  }
  std::sort(draws.begin(), draws.end(), [](const Draw& a, const Draw& b) {
    if (a.s != b.s) return a.s < b.s;
    if (a.p.x != b.p.x) return a.p.x < b.p.x;
    return a.p.y < b.p.y;
  });
  std::vector<SamplePair> out;
  for (int i = 0; i < count; ++i) out.push_back(draws[static_cast<std::size_t>((i + 0.5) * total / count)].p);
  return out;
}

PairIndex index_pairs(const std::vector<SamplePair>& pairs) {
  PairIndex pi_;
  std::map<Index, Index> slot;
  for (const auto& p : pairs)
    for (Index q : {p.x, p.y})
      if (slot.emplace(q, 0).second) pi_.points.push_back(q);
  std::sort(pi_.points.begin(), pi_.points.end());
  for (std::size_t i = 0; i < pi_.points.size(); ++i) slot[pi_.points[i]] = static_cast<Index>(i);
  for (const auto& p : pairs) pi_.slots.emplace_back(slot[p.x], slot[p.y]);
  return pi_;
}

double FtKernel::sup() const {
  double s = 0.0;
  for (const auto& v : values) s = std::max(s, std::abs(v));
  return s;
}

FtKernel compute_F_t(const ThresholdData& td, const LaurentExpansion& le, const CutoffSpec& cutoff, double t,
                     const std::vector<SamplePair>& pairs, const QuadratureOptions& opt) {
  if (td.s1().dim() == 0) throw EmptySubspace("F_t vanishes at a regular threshold");
  const auto& g = td.grid();
  const auto& S = td.split().support;
  const RVector& v = td.family().v_support();
  const double w = g.weight();

  FtKernel F;
  F.t = t;
  F.h = compute_h_of_t(cutoff, t, opt).value;
  F.core1 = v.asDiagonal() * le.c_minus1 * v.asDiagonal();
  F.core2 = v.asDiagonal() * le.c_minus2 * v.asDiagonal();
  F.has_f1 = td.s2().dim() > 0;
  F.rank_one = td.s1().dim() == 1 && !F.has_f1;

  const PairIndex pi_ = index_pairs(pairs);
  const CMatrix Kt = chirped_block(g, t, false, pi_.points, S);
  const cplx pre = I * F.h / pi;
  const CMatrix full = pre * Kt * F.core1 * Kt.transpose() / w;
  for (const auto& [a, b] : pi_.slots) F.leading.push_back(full(a, b));

  if (F.rank_one) {
    Eigen::JacobiSVD<CMatrix> svd(F.core1, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    F.s_left = sv[0] * svd.matrixU().col(0);
    F.s_right = svd.matrixV().col(0).conjugate();
    const CVector left = Kt * F.s_left, right = Kt * F.s_right;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < pi_.slots.size(); ++i) {
      const auto [a, b] = pi_.slots[i];
      F.factored.push_back(pre * left[a] * right[b] / w);
      num = std::max(num, std::abs(F.factored.back() - F.leading[i]));
      den = std::max(den, std::abs(F.leading[i]));
    }
    const double tail = sv.size() > 1 ? sv[1] / sv[0] : 0.0;
    F.factorization_residual = std::max(tail, den > 0 ? num / den : 0.0);
  }

  F.f1.assign(pairs.size(), cplx(0.0));
  if (F.has_f1) {
    std::vector<RVector> dist(pi_.points.size());
    double a_max = 0.0;
    for (std::size_t i = 0; i < pi_.points.size(); ++i) {
      const auto x = g.point(pi_.points[i]);
      dist[i].resize(static_cast<Index>(S.size()));
      for (std::size_t u = 0; u < S.size(); ++u) dist[i][u] = distance(x, g.point(S[u]));
      a_max = std::max(a_max, dist[i].maxCoeff());
    }
    const JTable J(cutoff, t, 2.0 * a_max * 1.0001, opt);
    const Index n = static_cast<Index>(S.size());
    const cplx scale = -w / (pi * 16.0 * pi * pi);
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
    for (std::size_t i = 0; i < pi_.slots.size(); ++i) {
      const auto [a, b] = pi_.slots[i];
      cplx acc = 0.0;
      for (Index u1 = 0; u1 < n; ++u1) {
        const double a1 = dist[a][u1];
        for (Index u2 = 0; u2 < n; ++u2) {
          const double a2 = dist[b][u2];
          acc += F.core2(u1, u2) * J(a1 + a2) / (a1 * a2);
        }
      }
      F.f1[i] = scale * w * acc;
    }
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) F.values.push_back(F.leading[i] + F.f1[i]);
  return F;
}

KLambdaPlan::KLambdaPlan(const ThresholdData& td, const LaurentExpansion& le, const CutoffSpec& cutoff,
                         std::vector<SamplePair> pairs, const QuadratureOptions& opt)
    : cutoff_(cutoff), opt_(opt), pairs_(std::move(pairs)) {
  const auto& g = td.grid();
  const double w = g.weight();
  const PairIndex pi_ = index_pairs(pairs_);
  const Index np = static_cast<Index>(pi_.points.size());
  CMatrix q2 = CMatrix::Zero(np, np);
  if (td.s2().dim() > 0) {
    const auto& S = td.split().support;
    const RVector& v = td.family().v_support();
    const CMatrix left = resolvent_block(g, 0.0, pi_.points, S) * v.asDiagonal();
    q2 = -left * le.c_minus2 * left.transpose();
  }
  const double l0 = cutoff.lambda0();
  const std::function<CVector(double)> f = [&](double s) {
    const double lambda = l0 * s;
    const CMatrix R = lambda * rv_block(td, lambda, pi_.points, pi_.points) - q2 / lambda;
    CVector out(static_cast<Index>(pi_.slots.size()));
    for (std::size_t i = 0; i < pi_.slots.size(); ++i) out[i] = R(pi_.slots[i].first, pi_.slots[i].second) / w;
    return out;
  };
  const std::vector<double> checks = {0.11, 0.29, 0.53, 0.77, 0.94};
  std::vector<CVector> fc(checks.size());
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (std::size_t c = 0; c < checks.size(); ++c) fc[c] = f(checks[c]);
  for (int n = 16; n <= opt.max_nodes; n *= 2) {
    g_ = chebyshev_interpolate(f, n, true);
    nodes_ = n;
    double err = 0.0, scale = 0.0;
    for (std::size_t c = 0; c < checks.size(); ++c) {
      err = std::max(err, (g_(checks[c]) - fc[c]).cwiseAbs().maxCoeff());
      scale = std::max(scale, fc[c].cwiseAbs().maxCoeff());
    }
    residual_ = scale > 0 ? err / scale : err;
    if (residual_ <= opt.interpolation_tolerance) return;
  }
  std::ostringstream os;
  os << "lambda interpolation residual " << residual_ << " above " << opt.interpolation_tolerance;
  throw QuadratureFailure(os.str());
}

std::vector<cplx> KLambdaPlan::values(double t) const {
  const CVector M = chirp_moments(cutoff_, t, nodes_, opt_);
  const CVector K = g_.coeffs.transpose() * M / (pi * I);
  return {K.data(), K.data() + K.size()};
}

TheoremTable theorem_check(const ThresholdData& td, const CutoffSpec& cutoff, const std::vector<double>& times,
                           const std::vector<SamplePair>& pairs, const QuadratureOptions& opt) {
  TheoremTable tab;
  tab.regular = td.s1().dim() == 0;
  LaurentExpansion le;
  if (!tab.regular) le = laurent_of_A_inverse(td);
  const KLambdaPlan plan(td, le, cutoff, pairs, opt);
  tab.chebyshev_nodes = plan.node_count();
  tab.interpolation_residual = plan.interpolation_residual();
  std::vector<double> ts, ds;
  for (double t : times) {
    const auto K = plan.values(t);
    TheoremRow row;
    row.t = t;
    std::vector<cplx> F(pairs.size(), cplx(0.0));
    if (!tab.regular) F = compute_F_t(td, le, cutoff, t, pairs, opt).values;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      row.D = std::max(row.D, std::abs(K[i] - F[i] / std::sqrt(t)));
      row.Ft_sup = std::max(row.Ft_sup, std::abs(F[i]));
      row.K_sup = std::max(row.K_sup, std::abs(K[i]));
    }
    tab.rows.push_back(row);
    ts.push_back(t);
    ds.push_back(row.D);
  }
  if (ts.size() >= 2) {
    const LineFit fit = fit_loglog(ts, ds);
    tab.slope = fit.slope;
    tab.intercept = fit.intercept;
    tab.r_squared = fit.r_squared;
  }
  return tab;
}

cplx weak_pairing(const ThresholdData& td, const LaurentExpansion& le, const CutoffSpec& cutoff, double t,
                  const CVector& f, const CVector& g, bool limit) {
  if (td.s1().dim() == 0) throw EmptySubspace("F_t vanishes at a regular threshold");
  const auto& grid = td.grid();
  if (f.size() != grid.size() || g.size() != grid.size()) throw std::invalid_argument("weak_pairing: size mismatch");
  const auto& S = td.split().support;
  const RVector& v = td.family().v_support();
  const CMatrix core = v.asDiagonal() * le.c_minus1 * v.asDiagonal();
  const CMatrix Kt = chirped_block(grid, t, limit, all_indices(grid), S);
  const cplx h = limit ? h_limit() : compute_h_of_t(cutoff, t).value;
  const CVector left = Kt.transpose() * g.conjugate();
  const CVector right = Kt.transpose() * f;
  // h^6 sum conj(g) F f with F = (i h/pi) Kt core Kt^T / h^3.
  return grid.weight() * (I * h / pi) * (left.transpose() * core * right)(0, 0);
}

}  // namespace tscope
