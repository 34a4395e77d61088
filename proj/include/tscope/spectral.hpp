#pragma once

#include "tscope/grid.hpp"

#include <vector>

namespace tscope {

// Periodic Fourier-spectral -d^2/dx^2 on n cell centres of spacing h.
RMatrix spectral_laplacian_1d(int n, double h);

// Dense eigendecomposition of H = -Delta + V with the Fourier Laplacian.
class SpectralDecomposition {
public:
  SpectralDecomposition(const Grid3& g, const RVector& V, double zero_tol = 1e-8);

  const Grid3& grid() const { return grid_; }
  const RVector& eigenvalues() const { return evals_; }
  const RMatrix& eigenvectors() const { return evecs_; }
  double zero_tol() const { return zero_tol_; }

  std::vector<Index> bound_set() const;
  std::vector<Index> zero_set() const;
  // Indices of the `count` eigenvalues closest to zero.
  std::vector<Index> nearest_zero(Index count) const;

  // Sets the indices projected out by P_ac; defaults to bound_set + zero_set.
  void set_excluded(std::vector<Index> idx) { excluded_ = std::move(idx); }
  const std::vector<Index>& excluded() const { return excluded_; }

  RMatrix projector(const std::vector<Index>& idx) const;
  CVector project_ac(const CVector& psi) const;

private:
  Grid3 grid_;
  RVector evals_;
  RMatrix evecs_;
  double zero_tol_;
  std::vector<Index> excluded_;
};

// psi(t) = sum_j e^{i t lambda_j} <u_j, psi0> u_j, optionally restricted to P_ac.
std::vector<GridFunction> evolve_dense_spectral(const SpectralDecomposition& sd, const GridFunction& psi0,
                                                const std::vector<double>& times, bool ac_only = true);

// Largest principal angle cosine squared between two subspaces, averaged:
// tr(P Q)/max(dim) for orthonormal frames.
double subspace_overlap(const CMatrix& A, const CMatrix& B);

}  // namespace tscope
