#pragma once

// Invariant suite behind `nlcoupler selfcheck`.

#include "nlc/gaussian.hpp"
#include "nlc/quantum.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace nlc {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelfcheckOptions {
  std::uint64_t seed = 12345;
  /// Step for the trajectory-based checks and the step-accuracy check.
  double step = 1e-3;
  int random_trials = 25;
  /// Replaces the drift in the symplecticity check (fault injection).
  DriftFunction drift;
};

std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& opts);

bool all_passed(const std::vector<CheckResult>& results);
std::string format_results(const std::vector<CheckResult>& results);

/// S (1/2) S^T with S = exp(Omega H), H symmetric with N(0, scale) entries.
CovarianceMatrix random_pure_state(int n_modes, std::mt19937_64& rng, double scale = 0.4);
/// S diag(nu) S^T with symplectic eigenvalues nu in [1/2, 1/2 + max_excess].
CovarianceMatrix random_mixed_state(int n_modes, std::mt19937_64& rng, double max_excess = 1.0);

}  // namespace nlc
