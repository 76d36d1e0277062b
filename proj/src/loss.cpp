#include "nlc/loss.hpp"

#include "nlc/errors.hpp"

#include <cmath>
#include <string>

namespace nlc {

std::string_view to_string(LossConvention c) {
  switch (c) {
    case LossConvention::kDecibel: return "decibel";
    case LossConvention::kNaturalExponent: return "natural_exponent";
    case LossConvention::kAmplitudeDecibel: return "amplitude_decibel";
  }
  return "decibel";
}

LossConvention loss_convention_from_string(std::string_view s) {
  if (s == "decibel") return LossConvention::kDecibel;
  if (s == "natural_exponent") return LossConvention::kNaturalExponent;
  if (s == "amplitude_decibel") return LossConvention::kAmplitudeDecibel;
  throw InvalidArgument("unknown loss convention '" + std::string(s) +
                        "' (expected decibel, natural_exponent or amplitude_decibel)");
}

void LossSpec::validate() const {
  if (!(gamma_f >= 0.0) || !(gamma_h >= 0.0) || !std::isfinite(gamma_f) || !std::isfinite(gamma_h)) {
    throw InvalidArgument("loss coefficients must be finite and >= 0");
  }
}

double eta(double gamma, double z_cm, LossConvention conv) {
  if (!(gamma >= 0.0) || !(z_cm >= 0.0) || !std::isfinite(gamma) || !std::isfinite(z_cm)) {
    throw InvalidArgument("eta: gamma and z must be finite and >= 0");
  }
  switch (conv) {
    case LossConvention::kDecibel: return std::pow(10.0, -gamma * z_cm / 10.0);
    case LossConvention::kNaturalExponent: return std::exp(-gamma * z_cm);
    case LossConvention::kAmplitudeDecibel: return std::pow(10.0, -gamma * z_cm / 20.0);
  }
  return 1.0;
}

CovarianceMatrix apply_loss(const CovarianceMatrix& v, std::span<const double> etas) {
  const int n = v.n_modes();
  if (static_cast<int>(etas.size()) != n) {
    throw InvalidArgument("apply_loss: need one transmittivity per mode (" + std::to_string(n) + "), got " +
                          std::to_string(etas.size()));
  }
  for (double e : etas) {
    if (!(e > 0.0 && e <= 1.0)) throw InvalidArgument("apply_loss: transmittivity " + std::to_string(e) + " outside (0, 1]");
  }
  Eigen::MatrixXd out = v.matrix();
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      out.block<2, 2>(2 * j, 2 * k) *= std::sqrt(etas[static_cast<std::size_t>(j)] * etas[static_cast<std::size_t>(k)]);
    }
    const double add = kVacuumVariance * (1.0 - etas[static_cast<std::size_t>(j)]);
    out(2 * j, 2 * j) += add;
    out(2 * j + 1, 2 * j + 1) += add;
  }
  return CovarianceMatrix(std::move(out));
}

std::vector<double> coupler_etas(const LossSpec& loss, double z_cm) {
  loss.validate();
  const double ef = eta(loss.gamma_f, z_cm, loss.convention);
  const double eh = eta(loss.gamma_h, z_cm, loss.convention);
  return {ef, ef, eh, eh};
}

}  // namespace nlc
