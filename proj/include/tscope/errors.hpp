#pragma once

#include <stdexcept>
#include <string>

namespace tscope {

// Process exit codes; each failing pipeline stage maps to one of these.
enum class ExitCode : int {
  ok = 0,
  config = 1,
  gap = 2,
  conditioning = 3,
  window = 4,
  quadrature = 5,
};

class Error : public std::runtime_error {
public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

private:
  ExitCode code_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ExitCode::config, w) {}
};

// Eigenvalue magnitudes fall inside [eps_rank, gap_factor*eps_rank).
struct GapAmbiguity : Error {
  explicit GapAmbiguity(const std::string& w) : Error(ExitCode::gap, w) {}
};

struct ConditioningFailure : Error {
  explicit ConditioningFailure(const std::string& w) : Error(ExitCode::conditioning, w) {}
};

struct NearSingular : ConditioningFailure {
  explicit NearSingular(const std::string& w) : ConditioningFailure(w) {}
};

struct BNotInvertible : ConditioningFailure {
  explicit BNotInvertible(const std::string& w) : ConditioningFailure(w) {}
};

struct WindowTooShort : Error {
  explicit WindowTooShort(const std::string& w) : Error(ExitCode::window, w) {}
};

struct QuadratureFailure : Error {
  explicit QuadratureFailure(const std::string& w) : Error(ExitCode::quadrature, w) {}
};

// Thrown by compute_P0 when rank(S2) = 0 and by compute_F_t on a regular threshold.
struct EmptySubspace : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace tscope
