#pragma once

#include "nlc/devices.hpp"

#include <cmath>

namespace nlc::test {

// Default coupler (kappa = 1.13, seeded harmonic), computed once per process.
inline const CouplerReport& default_run() {
  static const CouplerReport r = run_coupler(coupler_preset(Figure::kFig3));
  return r;
}

inline const CouplerSample& nearest(const CouplerReport& r, double zeta) {
  const CouplerSample* best = &r.samples.front();
  for (const auto& s : r.samples) {
    if (std::abs(s.zeta - zeta) < std::abs(best->zeta - zeta)) best = &s;
  }
  return *best;
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace nlc::test
