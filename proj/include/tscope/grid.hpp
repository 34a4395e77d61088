#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace tscope {

using cplx = std::complex<double>;
using Index = Eigen::Index;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Point3 = std::array<double, 3>;

inline constexpr double pi = 3.14159265358979323846;

// Worker count for parallel loops, capped by THRESHOLD_SCOPE_THREADS when set.
int worker_count();

inline double distance(const Point3& a, const Point3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Uniform cell-centred grid on [-L, L]^3, lexicographic (i, j, k) ordering with k fastest.
class Grid3 {
public:
  Grid3() = default;
  Grid3(int n, double L);

  int n() const { return n_; }
  double L() const { return L_; }
  double h() const { return h_; }
  double weight() const { return h_ * h_ * h_; }
  Index size() const { return static_cast<Index>(n_) * n_ * n_; }

  double coord(int i) const { return -L_ + h_ * (i + 0.5); }
  Index index(int i, int j, int k) const { return (static_cast<Index>(i) * n_ + j) * n_ + k; }
  Point3 point(Index p) const;
  double radius(Index p) const;
  // Index of the point reflected through the origin.
  Index mirror(Index p) const;

  bool operator==(const Grid3&) const = default;

private:
  int n_ = 0;
  double L_ = 0.0;
  double h_ = 0.0;
};

Grid3 build_grid(int n, double L);

struct GridFunction {
  Grid3 grid;
  CVector values;

  GridFunction(Grid3 g, CVector v);
  explicit GridFunction(Grid3 g) : GridFunction(g, CVector::Zero(g.size())) {}
  double l2_norm() const { return values.norm() * std::sqrt(grid.weight()); }
};

// I0 = integral of 1/(4 pi |r|) over the unit cube centred at the origin.
double cell_self_integral();

enum class KernelKind { Gj, FreeResolventPlus };

struct KernelMatrix {
  Grid3 grid;
  KernelKind kind = KernelKind::Gj;
  int j = 0;
  double lambda = 0.0;
  CMatrix entries;
  std::string diagonal_rule;
};

// Quadrature-weighted kernel entries; `same` marks the diagonal cell.
double gj_entry(const Grid3& g, int j, double r, bool same);
cplx resolvent_entry(const Grid3& g, double lambda, double r, bool same);

KernelMatrix build_gj_kernel(const Grid3& g, int j);
KernelMatrix build_free_resolvent_plus(const Grid3& g, double lambda);

// Kernel blocks between index subsets of the same grid.
RMatrix gj_block(const Grid3& g, int j, const std::vector<Index>& rows, const std::vector<Index>& cols);
CMatrix resolvent_block(const Grid3& g, double lambda, const std::vector<Index>& rows,
                        const std::vector<Index>& cols);

std::vector<Index> all_indices(const Grid3& g);

}  // namespace tscope
