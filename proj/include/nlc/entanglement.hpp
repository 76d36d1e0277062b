#pragma once

#include "nlc/classical.hpp"
#include "nlc/gaussian.hpp"
#include "nlc/quantum.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace nlc {

/// Logarithmic negativities of a four-mode state.
struct PairReport {
  // single-mode parties, the other two modes traced out
  double fa_fb = 0.0;
  double ha_hb = 0.0;
  double fa_ha = 0.0;  // same waveguide
  double fa_hb = 0.0;  // different waveguides
  // two-mode parties
  double ff_hh = 0.0;        // (f_a f_b | h_a h_b)
  double fa_ha_fb_hb = 0.0;  // (f_a h_a | f_b h_b)
  double fa_hb_fb_ha = 0.0;  // (f_a h_b | f_b h_a)
};

PairReport pairwise_negativities(const CovarianceMatrix& v);

/// E_N between two single modes after tracing out the rest.
double pair_negativity(const CovarianceMatrix& v, Mode j, Mode k);

/// The three 2|2 splittings, in PairReport order.
std::array<Bipartition, 3> two_by_two_splits();

/// Smallest E_N(2|2) - E_N(j,k) over the three splittings and every pair
/// (j, k) with j and k on opposite sides. Non-negative whenever tracing
/// cannot increase negativity, which is always.
double hierarchy_margin(const CovarianceMatrix& v);

/// One van Loock-Furusawa combination:
///   Var(X_j - X_k) + min_g Var(Y_j + Y_k + g_1 Y_l1 + g_2 Y_l2).
struct VlfCombination {
  Mode first;
  Mode second;
  std::array<Mode, 2> gain_modes;
};

using VlfSet = std::array<VlfCombination, 3>;

inline constexpr double kVlfThreshold = 2.0;

/// Chain (h_a, f_a, f_b, h_b): (h_a,f_a), (f_a,f_b), (f_b,h_b). The first and
/// third are mirror images under a <-> b.
VlfSet default_vlf_set();

/// "h_a,f_a|f_b,h_b" form.
std::string describe(const VlfCombination& c);
VlfCombination parse_vlf_combination(std::string_view text);

struct VlfRow {
  std::array<double, 3> values{};
  std::array<std::array<double, 2>, 3> gains{};
  std::array<bool, 3> used_pseudo_inverse{};

  bool all_violated() const;
};

/// Value of one combination at the given gains.
double vlf_value(const CovarianceMatrix& v, const VlfCombination& c, std::array<double, 2> gains);

/// Each combination minimised over its two gains in closed form (normal
/// equations on the Y covariance block; pseudo-inverse when singular).
VlfRow vlf_values(const CovarianceMatrix& v, const VlfSet& set);

struct QuadratureVariances {
  double var_x = 0.0;
  double var_y = 0.0;
  double min_variance = 0.0;  // smallest eigenvalue of the 2x2 block
  double max_variance = 0.0;
  bool squeezed() const { return min_variance < kVacuumVariance; }
};

/// Per mode: diagonal entries and eigenvalues of its 2x2 block.
std::vector<QuadratureVariances> squeezing_variances(const CovarianceMatrix& v);

/// Variances of the supermode (j + sign k)/sqrt2, sign = +1 or -1.
QuadratureVariances supermode_variances(const CovarianceMatrix& v, int j, int k, int sign);

/// Harmonic power below this counts as a zero mean field.
inline constexpr double kZeroMeanPower = 1e-4;

struct FidelityFit {
  double r = 0.0;
  double fidelity = 0.0;
};

/// Golden-section maximisation of fidelity_to_tmsv over r in [lo, hi].
FidelityFit best_tmsv_fit(const CovarianceMatrix& two_mode, double lo = 0.0, double hi = 2.0);

struct EprFinding {
  double zeta0 = 0.0;
  double harmonic_power = 0.0;
  bool zero_mean = false;
  double purity_h = 0.0;
  double en_hh = 0.0;
  double r_star = 0.0;
  double fidelity = 0.0;
  /// r of the two-mode squeezed vacuum with the same negativity, E_N ln2 / 2.
  double r_negativity_matched = 0.0;
  double fidelity_negativity_matched = 0.0;
  double harmonic_local_min_variance = 0.0;
  double harmonic_supermode_min_variance = 0.0;
};

/// Interior local minimum of u_h^2 + v_h^2 with the smallest value, refined by
/// a three-point parabola. Throws InvalidArgument if there is none.
double locate_harmonic_minimum(const Trajectory& traj);

/// EPR figures of merit for the harmonic pair of a four-mode state at zeta0.
EprFinding epr_at(double zeta0, double harmonic_power, const CovarianceMatrix& v);

/// find on sampled data: zeta0 from the trajectory, state from the nearest
/// sample.
EprFinding find_epr(const Trajectory& traj, std::span<const CovarianceMatrix> covariances);

}  // namespace nlc
