#pragma once

// End-to-end pipelines for the nonlinear directional coupler and the
// sequential two-mode squeezer (two SHG waveguides, then a linear coupler).

#include "nlc/classical.hpp"
#include "nlc/entanglement.hpp"
#include "nlc/gaussian.hpp"
#include "nlc/loss.hpp"
#include "nlc/quantum.hpp"

#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nlc {

/// Default waveguide constants: C = 0.08 mm^-1, g = 0.0025 mm^-1 mW^-1/2.
inline constexpr double kDefaultCoupling = 0.08;
inline constexpr double kDefaultNonlinearity = 0.0025;
inline constexpr double kDefaultKappa = 1.13;
inline constexpr double kDefaultPowerRatio = 1e-18;

struct CouplerDevice {
  CouplerParams params = CouplerParams::from_kappa(kDefaultKappa, kDefaultCoupling, kDefaultNonlinearity);
  double power_ratio = kDefaultPowerRatio;
  double theta_f0 = 0.0;
  double phi_f0 = 0.0;
  IntegrationGrid grid;
  LossSpec loss;
  Propagator propagator = Propagator::kGeneratorExponential;
  double defect_limit = kDefectAbortLimit;
  double richardson_tolerance = 1e-8;
  VlfSet vlf = default_vlf_set();

  void validate() const;
};

struct CouplerSample {
  double zeta = 0.0;
  double z_mm = 0.0;
  ClassicalState state;
  /// Fields scaled by sqrt(eta) per mode; equals `state` when lossless.
  ClassicalState lossy_state;
  CovarianceMatrix v = vacuum_cm(4);
  CovarianceMatrix v_lossy = vacuum_cm(4);
  PairReport pairs;
  PairReport pairs_lossy;
  VlfRow vlf;
  double hierarchy_margin = 0.0;
};

struct CouplerReport {
  CouplerDevice device;
  double kappa = 0.0;
  double max_defect = 0.0;
  std::vector<CouplerSample> samples;
  /// Present when the harmonic power has an interior minimum; the state is
  /// re-propagated to land exactly on zeta0.
  std::optional<EprFinding> epr;
  std::string epr_note;
  RichardsonReport richardson;
};

CouplerReport run_coupler(const CouplerDevice& d);

/// Stage 1: one waveguide on its own (kappa = 0, a_f(0) = 1), zeta computed
/// from the power in that waveguide.
struct ShgSample {
  double zeta = 0.0;
  double z_mm = 0.0;
  cplx a_f{};
  cplx a_h{};
  std::optional<double> delta_theta;
  CovarianceMatrix v = vacuum_cm(2);  // (f, h)
};

struct ShgReport {
  double power_mw = 0.0;
  double nonlinearity = 0.0;
  double max_defect = 0.0;
  std::vector<ShgSample> samples;
};

ShgReport run_single_shg(double power_mw, double nonlinearity, const IntegrationGrid& grid,
                         Propagator scheme = Propagator::kGeneratorExponential);

/// Beam-splitter-type symplectic of the linear coupler over length z:
/// X_a -> c X_a - s Y_b, Y_a -> c Y_a + s X_b (and a <-> b), c = cos(Cz),
/// s = sin(Cz); harmonic quadratures untouched.
Mat8 linear_coupler_transfer(double coupling, double z_mm);

CovarianceMatrix run_linear_coupler(const CovarianceMatrix& v0, double coupling, double z_mm);
std::vector<CovarianceMatrix> run_linear_coupler(const CovarianceMatrix& v0, double coupling,
                                                 std::span<const double> z_mm);

/// pi / (2C) in mm.
double beat_length(double coupling);

struct TwoModeSqueezerDevice {
  double stage1_length_mm = 10.0;
  double nonlinearity = kDefaultNonlinearity;
  /// P/2 of the coupler preset by default.
  double power_per_waveguide_mw =
      CouplerParams::from_kappa(kDefaultKappa, kDefaultCoupling, kDefaultNonlinearity).power_mw / 2.0;
  double coupling = kDefaultCoupling;
  /// Stage-2 sweep 0..coupler_length_mm in coupler_points samples.
  double coupler_length_mm = 4.0 * std::numbers::pi / (2.0 * kDefaultCoupling);
  int coupler_points = 401;
  double step = 1e-3;
  Propagator propagator = Propagator::kGeneratorExponential;
  VlfSet vlf = default_vlf_set();

  void validate() const;
  double stage1_zeta() const;
};

struct SqueezerSample {
  double z_mm = 0.0;
  CovarianceMatrix v = vacuum_cm(4);
  PairReport pairs;
  VlfRow vlf;
};

struct SqueezerReport {
  TwoModeSqueezerDevice device;
  ShgReport stage1;
  CovarianceMatrix input = vacuum_cm(4);  // canonical order, at the coupler entrance
  std::vector<SqueezerSample> samples;
};

SqueezerReport run_two_mode_squeezer(const TwoModeSqueezerDevice& d);

/// Figure presets.
enum class Figure { kFig2, kFig3, kFig4, kFig5, kFig6, kFig7, kFig8 };

std::string_view to_string(Figure f);
Figure figure_from_string(std::string_view s);
bool is_coupler_figure(Figure f);

CouplerDevice coupler_preset(Figure f);
/// 10 mm nonlinear stage, coupler swept over 4 beat lengths.
TwoModeSqueezerDevice squeezer_preset();

/// Single-waveguide SHG range shown for the squeezer's first stage.
inline constexpr double kShgPresetZetaEnd = 3.0;

/// Same waveguides at twice the input power; zeta_end scaled by sqrt2 so
/// the physical length is unchanged (kappa 1.13 -> 0.80).
CouplerDevice doubled_power(const CouplerDevice& d);

}  // namespace nlc
