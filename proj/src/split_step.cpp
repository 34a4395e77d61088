#include "tscope/split_step.hpp"

#include "tscope/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tscope {

struct SplitStepPropagator::Fft {
  explicit Fft(int n) : size(static_cast<std::size_t>(n) * n * n) {
    buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size));
    fwd = fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(buf);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  cplx* data() { return reinterpret_cast<cplx*>(buf); }

  std::size_t size;
  fftw_complex* buf = nullptr;
  fftw_plan fwd = nullptr, bwd = nullptr;
};

namespace {

double wavenumber(int m, int n, double h) {
  const int f = m < (n + 1) / 2 ? m : m - n;
  return 2.0 * pi * f / (n * h);
}

}  // namespace

SplitStepPropagator::SplitStepPropagator(const Grid3& g, const RVector& V, double dt, Absorber absorber)
    : grid_(g), dt_(dt), fft_(std::make_unique<Fft>(g.n())) {
  if (V.size() != g.size()) throw std::invalid_argument("split-step: potential size mismatch");
  if (!(dt > 0.0)) throw std::invalid_argument("split-step: dt must be positive");
  const double vmax = V.size() ? V.cwiseAbs().maxCoeff() : 0.0;
  if (dt * vmax >= 0.1) {
    std::ostringstream os;
    os << "split-step: dt*max|V| = " << dt * vmax << " must stay below 0.1";
    throw std::invalid_argument(os.str());
  }
  const int n = g.n();
  const Index N = g.size();
  half_potential_.resize(N);
  kinetic_.resize(N);
  mask_ = RVector::Ones(N);
  for (Index p = 0; p < N; ++p) half_potential_[p] = std::exp(cplx(0.0, 0.5 * dt * V[p]));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double kx = wavenumber(i, n, g.h()), ky = wavenumber(j, n, g.h()), kz = wavenumber(k, n, g.h());
        kinetic_[g.index(i, j, k)] = std::exp(cplx(0.0, dt * (kx * kx + ky * ky + kz * kz))) / static_cast<double>(N);
      }
  if (absorber.width_fraction > 0.0) {
    absorbing_ = true;
    const double w = absorber.width_fraction * g.L();
    auto layer = [&](double x) {
      const double d = std::max(std::abs(x) - (g.L() - w), 0.0) / w;
      return d * d;
    };
    for (Index p = 0; p < N; ++p) {
      const auto x = g.point(p);
      mask_[p] = std::exp(-absorber.strength * (layer(x[0]) + layer(x[1]) + layer(x[2])) * dt);
    }
  }
}

SplitStepPropagator::~SplitStepPropagator() = default;

double SplitStepPropagator::step(CVector& psi) {
  const Index N = grid_.size();
  const double before = psi.squaredNorm();
  cplx* b = fft_->data();
  for (Index p = 0; p < N; ++p) b[p] = half_potential_[p] * psi[p];
  fftw_execute(fft_->fwd);
  for (Index p = 0; p < N; ++p) b[p] *= kinetic_[p];
  fftw_execute(fft_->bwd);
  for (Index p = 0; p < N; ++p) psi[p] = half_potential_[p] * b[p];
  const double after = psi.squaredNorm();
  if (absorbing_) psi.array() *= mask_.array().cast<cplx>();
  return before > 0.0 ? std::sqrt(after / before) : 1.0;
}

Trajectory SplitStepPropagator::run(const GridFunction& psi0, const std::vector<double>& sample_times,
                                    bool keep_snapshots) {
  if (!(psi0.grid == grid_)) throw std::invalid_argument("split-step: grid mismatch");
  Trajectory tr;
  CVector psi = psi0.values;
  long step_no = 0;
  const double sw = std::sqrt(grid_.weight());
  for (double t : sample_times) {
    const long target = std::lround(t / dt_);
    if (target < step_no) throw std::invalid_argument("split-step: sample times must increase");
    while (step_no < target) {
      tr.unitary_drift += std::abs(step(psi) - 1.0);
      ++step_no;
      if (tr.unitary_drift > 1e-6) {
        std::ostringstream os;
        os << "split-step: unitary norm drift " << tr.unitary_drift << " exceeds 1e-6 at step " << step_no;
        throw QuadratureFailure(os.str());
      }
    }
    tr.samples.push_back({step_no * dt_, psi.cwiseAbs().maxCoeff(), psi.norm() * sw});
    if (keep_snapshots) tr.snapshots.emplace_back(grid_, psi);
  }
  return tr;
}

Trajectory evolve_split_step(const RVector& V, const GridFunction& psi0, double dt, long steps, Absorber absorber) {
  SplitStepPropagator prop(psi0.grid, V, dt, absorber);
  return prop.run(psi0, {0.0, static_cast<double>(steps) * dt}, true);
}

double rms_momentum(const GridFunction& psi) {
  const auto& g = psi.grid;
  const int n = g.n();
  std::vector<cplx> buf(psi.values.data(), psi.values.data() + psi.values.size());
  fftw_plan plan = fftw_plan_dft_3d(n, n, n, reinterpret_cast<fftw_complex*>(buf.data()),
                                    reinterpret_cast<fftw_complex*>(buf.data()), FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double kx = wavenumber(i, n, g.h()), ky = wavenumber(j, n, g.h()), kz = wavenumber(k, n, g.h());
        const double a = std::norm(buf[static_cast<std::size_t>(g.index(i, j, k))]);
        num += a * (kx * kx + ky * ky + kz * kz);
        den += a;
      }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

}  // namespace tscope
