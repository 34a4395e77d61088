#pragma once

#include "tscope/config.hpp"
#include "tscope/threshold.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace tscope {

// Reference potentials of the acceptance suite on the n = 12, L = 3 grid.
Grid3 reference_grid();
Potential critical_square_well(const Grid3& g);
Potential subcritical_square_well(const Grid3& g, double factor = 0.9);
Potential resonant_well(const Grid3& g);
Potential eigen_well(const Grid3& g);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  nlohmann::json data;
};

std::string format_result(const CriterionResult& r);

struct AcceptanceOptions {
  std::uint64_t seed = 1;
  // Criterion ids to run; empty runs all ten.
  std::vector<int> only;
};

CriterionResult criterion_jensen_nenciu(const AcceptanceOptions& opt);
CriterionResult criterion_critical_coupling(const AcceptanceOptions& opt);
CriterionResult criterion_m0_formula(const AcceptanceOptions& opt);
CriterionResult criterion_b0_identities(const AcceptanceOptions& opt);
CriterionResult criterion_p0(const AcceptanceOptions& opt);
CriterionResult criterion_laurent(const AcceptanceOptions& opt);
CriterionResult criterion_decay_dichotomy(const AcceptanceOptions& opt);
CriterionResult criterion_theorem_residual(const AcceptanceOptions& opt);
CriterionResult criterion_spectral_jump(const AcceptanceOptions& opt);
CriterionResult criterion_ft_structure(const AcceptanceOptions& opt);

// Runs the selected criteria in order, reporting each result as it completes.
// Exceptions inside a criterion become a FAIL line.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace tscope
