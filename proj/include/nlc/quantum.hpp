#pragma once

// Linearised quadrature fluctuations around a classical trajectory.
//
// Mode order everywhere is (f_a, f_b, h_a, h_b); quadrature index 2m is X of
// mode m and 2m+1 is Y.

#include "nlc/classical.hpp"
#include "nlc/gaussian.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace nlc {

using Mat8 = Eigen::Matrix<double, 8, 8>;

enum class Mode : int { kFa = 0, kFb = 1, kHa = 2, kHb = 3 };

inline constexpr std::array<Mode, 4> kAllModes{Mode::kFa, Mode::kFb, Mode::kHa, Mode::kHb};

constexpr int index(Mode m) { return static_cast<int>(m); }
constexpr int quad_x(Mode m) { return 2 * index(m); }
constexpr int quad_y(Mode m) { return 2 * index(m) + 1; }

std::string_view mode_name(Mode m);        // "f_a", ...
std::vector<std::string> csv_mode_names();  // "fa", "fb", "ha", "hb"
Mode mode_from_name(std::string_view name);

/// Drift matrix Delta(zeta) of d(xi)/d(zeta) = Delta xi at one classical state.
/// Built from Cartesian amplitudes (u sin(theta) = Im a), so it is regular
/// where a field vanishes.
Mat8 assemble_drift(const ClassicalState& s, double kappa);

/// max |Delta Omega + Omega Delta^T|; zero for Hamiltonian generators.
double hamiltonian_defect(const Mat8& drift);

/// max |S Omega S^T - Omega|.
double symplecticity_defect(const Eigen::MatrixXd& s);

/// Permutation P with xi_waveguide_major = P xi_canonical, where the
/// waveguide-major order is (X_f^A, Y_f^A, X_h^A, Y_h^A, X_f^B, ...).
Mat8 waveguide_major_permutation();

/// How the transfer matrix is built from the drift.
///  - kGeneratorExponential: S(zeta) = exp(integral of Delta), the integral
///    taken with the same RK4 stages as the classical fields.
///  - kTimeOrdered: dS/dzeta = Delta S, S(0) = 1, integrated jointly with
///    the classical fields.
enum class Propagator { kGeneratorExponential, kTimeOrdered };

std::string_view to_string(Propagator p);
Propagator propagator_from_string(std::string_view s);

struct QuantumSample {
  double zeta = 0.0;
  ClassicalState state;
  Mat8 transfer = Mat8::Identity();
  CovarianceMatrix covariance = vacuum_cm(4);
};

struct Propagation {
  Propagator scheme = Propagator::kGeneratorExponential;
  std::vector<QuantumSample> samples;
  double max_defect = 0.0;

  Trajectory trajectory() const;
};

inline constexpr double kDefectAbortLimit = 1e-6;

/// Replacement drift for fault-injection tests; empty means assemble_drift.
using DriftFunction = std::function<Mat8(const ClassicalState&, double)>;

/// Classical fields and transfer matrix advanced together; V = S (1/2) S^T at
/// each output sample. Throws NumericalError if S loses symplecticity beyond
/// `defect_limit` or the fields blow up.
Propagation propagate(const ClassicalState& s0, double kappa, const IntegrationGrid& grid,
                      Propagator scheme = Propagator::kGeneratorExponential,
                      double defect_limit = kDefectAbortLimit, const DriftFunction& drift = {});

/// Delta V + V Delta^T.
Mat8 covariance_rate(const Mat8& drift, const Mat8& v);

/// Integrates dV/dzeta = Delta V + V Delta^T directly from the vacuum; agrees
/// with the time-ordered transfer-matrix route.
std::vector<CovarianceMatrix> propagate_covariance_direct(const ClassicalState& s0, double kappa,
                                                          const IntegrationGrid& grid);

}  // namespace nlc
