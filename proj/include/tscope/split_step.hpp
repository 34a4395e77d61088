#pragma once

#include "tscope/grid.hpp"

#include <memory>
#include <vector>

namespace tscope {

// Quadratic complex absorbing layer of the given width fraction of L on each face;
// width_fraction = 0 disables it.
struct Absorber {
  double width_fraction = 0.0;
  double strength = 2.0;
};

struct TrajectorySample {
  double t = 0.0;
  double sup_norm = 0.0;
  double l2_norm = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<GridFunction> snapshots;
  // Accumulated |norm ratio - 1| of the unitary sub-steps.
  double unitary_drift = 0.0;
};

// Strang splitting for psi(t) = e^{itH} psi0 with the periodic Fourier Laplacian.
class SplitStepPropagator {
public:
  SplitStepPropagator(const Grid3& g, const RVector& V, double dt, Absorber absorber = {});
  ~SplitStepPropagator();
  SplitStepPropagator(const SplitStepPropagator&) = delete;
  SplitStepPropagator& operator=(const SplitStepPropagator&) = delete;

  const Grid3& grid() const { return grid_; }
  double dt() const { return dt_; }

  // Advances psi by one step; returns the norm ratio of the unitary part.
  double step(CVector& psi);
  Trajectory run(const GridFunction& psi0, const std::vector<double>& sample_times, bool keep_snapshots = false);

private:
  struct Fft;
  Grid3 grid_;
  double dt_;
  CVector half_potential_, kinetic_;
  RVector mask_;
  bool absorbing_ = false;
  std::unique_ptr<Fft> fft_;
};

// Samples and snapshots at t = 0 and t = steps * dt.
Trajectory evolve_split_step(const RVector& V, const GridFunction& psi0, double dt, long steps, Absorber absorber = {});

// Root-mean-square momentum of psi from its discrete Fourier transform.
double rms_momentum(const GridFunction& psi);

}  // namespace tscope
