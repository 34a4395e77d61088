#pragma once

#include "tscope/potential.hpp"
#include "tscope/split_step.hpp"
#include "tscope/threshold.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace tscope {

struct PotentialConfig {
  PotentialKind kind = PotentialKind::square_well;
  double radius = 1.0;
  // Depth (square well) or coupling (resonant, eigen); ignored when grid_critical.
  double coupling = 1.0;
  bool grid_critical = false;
  double factor = 1.0;
  Sampling sampling = Sampling::l1_preserving;
  std::string values_path;
};

struct TimeGrid {
  double t_min = 50.0;
  double t_max = 2000.0;
  int samples = 12;

  // Log-spaced, endpoints included.
  std::vector<double> times() const;
};

struct EvolveConfig {
  int n = 96;
  double L = 24.0;
  double dt = 0.02;
  double sigma = 1.0;
  double absorber_fraction = 0.5;
  double absorber_strength = 2.0;
  TimeGrid window{2.0, 20.0, 24};
  // Extra samples past the fit window up to this time, for the CSV series.
  double t_end = 20.0;
};

struct TuneConfig {
  int ell = 0;
  double c_lo = 1.0;
  double c_hi = 4.0;
};

struct RunConfig {
  PotentialConfig potential;
  int grid_n = 12;
  double grid_L = 3.0;
  double eps_rank = 0.0;  // 0 = auto
  double lambda0 = 0.0;   // 0 = auto
  TimeGrid time;
  int sample_pairs = 50;
  std::uint64_t seed = 1;
  EvolveConfig evolve;
  TuneConfig tune;

  ThresholdOptions threshold_options() const;
  // Canonical JSON of every field, the input of hash().
  nlohmann::json to_json() const;
  std::string hash() const;
};

// Throws ConfigError on malformed or out-of-range input.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

struct BuiltPotential {
  Potential potential;
  double coupling = 0.0;
  bool tuned = false;
};

// Configured potential on grid g, tuned to grid criticality when requested.
BuiltPotential build_potential(const PotentialConfig& pc, const Grid3& g);

}  // namespace tscope
