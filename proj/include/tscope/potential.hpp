#pragma once

#include "tscope/grid.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>

namespace tscope {

enum class PotentialKind { square_well, resonant, eigen, grid };
enum class Sampling { point, l1_preserving };

std::string to_string(PotentialKind k);

// Quintic Hermite bridge on [a, b] matching value, slope and curvature at both ends.
class QuinticBlend {
public:
  QuinticBlend(double a, double b, std::array<double, 3> left, std::array<double, 3> right);
  // Returns {p, p', p''} at r.
  std::array<double, 3> operator()(double r) const;

private:
  double a_, H_;
  std::array<double, 6> c_{};
};

class Potential {
public:
  using Profile = std::function<double(double)>;

  PotentialKind kind() const { return kind_; }
  double support_radius() const { return R_; }
  double beta() const { return beta_; }
  double coupling() const { return coupling_; }
  int ell() const { return ell_; }
  Sampling sampling() const { return sampling_; }
  bool is_radial() const { return kind_ != PotentialKind::grid; }

  // Unscaled radial shape W; the potential is coupling * W.
  double shape(double r) const;
  double value(double r) const { return coupling_ * shape(r); }
  // Continuum L1 norm, 4 pi * integral of r^2 |V|.
  double l1_norm() const;

  RVector sample(const Grid3& g) const;

  Potential with_coupling(double c) const;
  Potential with_sampling(Sampling s) const;

  // Zero-energy solution retained by the inverse constructions: the radial
  // function u (resonant, g = u/r) or f (eigen, g = f/r * z/r).
  bool has_known_solution() const { return static_cast<bool>(solution_); }
  GridFunction known_solution(const Grid3& g) const;

  static Potential square_well(double depth, double radius);
  static Potential resonant(double R, const std::string& shape = "quintic");
  static Potential eigen(double R, const std::string& shape = "quintic");
  static Potential from_grid(const Grid3& g, RVector values);

private:
  PotentialKind kind_ = PotentialKind::grid;
  double R_ = 0.0;
  double beta_ = std::numeric_limits<double>::infinity();
  double coupling_ = 1.0;
  int ell_ = 0;
  Sampling sampling_ = Sampling::point;
  Profile shape_;
  Profile solution_;
  std::optional<Grid3> grid_;
  RVector grid_values_;
};

// V = U v^2 = w v on the grid.
struct PotentialSplit {
  Grid3 grid;
  RVector V, U, v, w;
  double alpha = 0.0;
  // Points where v > 0, in grid order.
  std::vector<Index> support;
};

PotentialSplit split_potential(const Potential& V, const Grid3& g);
PotentialSplit split_samples(const Grid3& g, const RVector& V);

}  // namespace tscope
