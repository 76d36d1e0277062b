#pragma once

// Propagation loss as fictitious beam splitters applied at the analysis plane.

#include "nlc/gaussian.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace nlc {

/// How a loss figure gamma [dB/cm] over z [cm] becomes a power transmittivity.
///  - kDecibel:          10^(-gamma z / 10)
///  - kNaturalExponent:  exp(-gamma z), gamma read as a plain rate
///  - kAmplitudeDecibel: 10^(-gamma z / 20)
enum class LossConvention { kDecibel, kNaturalExponent, kAmplitudeDecibel };

std::string_view to_string(LossConvention c);
LossConvention loss_convention_from_string(std::string_view s);

/// Same values in both waveguides.
struct LossSpec {
  double gamma_f = 0.0;  // dB/cm
  double gamma_h = 0.0;  // dB/cm
  LossConvention convention = LossConvention::kDecibel;

  void validate() const;
  bool lossless() const { return gamma_f == 0.0 && gamma_h == 0.0; }
};

double eta(double gamma_db_per_cm, double z_cm, LossConvention conv = LossConvention::kDecibel);

/// V_jk -> sqrt(eta_j eta_k) V_jk (2x2 blocks), plus (1 - eta_j)/2 on the
/// diagonal blocks.
CovarianceMatrix apply_loss(const CovarianceMatrix& v, std::span<const double> etas);

/// Transmittivities for the canonical mode order (f_a, f_b, h_a, h_b) at
/// physical length z_cm.
std::vector<double> coupler_etas(const LossSpec& loss, double z_cm);

}  // namespace nlc
