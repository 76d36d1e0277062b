#pragma once

// Mean-field (classical) propagation of depleted second-harmonic generation in
// a pair of coupled chi(2) waveguides. Amplitudes are dimensionless complex
// numbers a = u exp(i theta) normalised so that the total power
// |a_f|^2 + |b_f|^2 + |a_h|^2 + |b_h|^2 is 1, and propagation runs in the
// normalised coordinate zeta = sqrt(2P) g z.

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace nlc {

using cplx = std::complex<double>;

/// Field amplitudes at one propagation plane: a = waveguide a, b = waveguide b,
/// f = fundamental, h = second harmonic.
struct ClassicalState {
  cplx a_f{};
  cplx b_f{};
  cplx a_h{};
  cplx b_h{};

  double total_power() const { return std::norm(a_f) + std::norm(b_f) + std::norm(a_h) + std::norm(b_h); }
  double harmonic_power() const { return std::norm(a_h) + std::norm(b_h); }
  bool all_finite() const;

  ClassicalState& operator+=(const ClassicalState& o);
  ClassicalState& operator*=(double s);
};

inline ClassicalState operator+(ClassicalState l, const ClassicalState& r) { return l += r; }
inline ClassicalState operator*(double s, ClassicalState v) { return v *= s; }

/// Physical coupler constants. Units: C in mm^-1, g in mm^-1 mW^-1/2, P in mW.
struct CouplerParams {
  double coupling = 0.0;
  double nonlinearity = 0.0;
  double power_mw = 0.0;

  double kappa() const;
  /// d(zeta)/dz in mm^-1.
  double zeta_per_mm() const;

  /// Power that yields `kappa` for the given C and g.
  static CouplerParams from_kappa(double kappa, double coupling, double nonlinearity);
};

/// Fixed-step grid: `step` is the RK4 step, every `stride`-th step is kept
/// (the final point always is). The step is shrunk slightly when needed so
/// that an integer number of steps lands exactly on zeta_end.
struct IntegrationGrid {
  double zeta_end = 3.5;
  double step = 1e-3;
  int stride = 10;

  void validate() const;
  long n_steps() const;
  double effective_step() const;
};

struct TrajectorySample {
  double zeta = 0.0;
  ClassicalState state;
};

using Trajectory = std::vector<TrajectorySample>;

/// Equal fundamental powers in both guides, harmonic seeded at
/// `power_ratio` times the fundamental with the same phases.
ClassicalState initial_state(double power_ratio, double theta_f0 = 0.0, double phi_f0 = 0.0);

/// d/dzeta of the amplitudes:
///   a_f' = i kappa b_f + i a_h conj(a_f),   a_h' = i a_f^2
/// and the same with a <-> b.
ClassicalState derivative(const ClassicalState& s, double kappa);

/// RK4 trajectory from zeta = 0. Throws NumericalError if the state becomes
/// non-finite.
Trajectory integrate(const ClassicalState& s0, double kappa, const IntegrationGrid& grid);

/// Amplitudes below this modulus have no meaningful phase.
inline constexpr double kPhaseEpsilon = 1e-12;

/// theta_h - 2 theta_f (waveguide a) and phi_h - 2 phi_f (waveguide b),
/// wrapped to (-pi, pi]. Empty where an amplitude is below kPhaseEpsilon.
struct PhaseMismatch {
  std::optional<double> a;
  std::optional<double> b;
};

PhaseMismatch phase_mismatch(const ClassicalState& s);

/// Continuity-based unwrapping; undefined samples become NaN and do not
/// break the running offset.
std::vector<double> unwrap_phases(std::span<const std::optional<double>> wrapped);

double kappa_from_physical(double coupling, double nonlinearity, double power_mw);

/// Physical length in mm for a normalised coordinate.
double zeta_to_z(double zeta, double nonlinearity, double power_mw);

/// Step-halving consistency check of the classical integrator at zeta_end.
struct RichardsonReport {
  double step = 0.0;
  double error_estimate = 0.0;  // estimated error of the run at `step`
  double observed_order = 0.0;  // log2 of successive difference ratio
  bool degraded = false;        // error_estimate > tolerance
};

RichardsonReport richardson_check(const ClassicalState& s0, double kappa, double zeta_end,
                                  double step, double tolerance = 1e-8);

}  // namespace nlc
