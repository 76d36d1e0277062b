#include "nlc/entanglement.hpp"

#include "nlc/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

namespace nlc {

double pair_negativity(const CovarianceMatrix& v, Mode j, Mode k) {
  return log_negativity(reduce(v, {index(j), index(k)}), Bipartition{{0}, {1}});
}

std::array<Bipartition, 3> two_by_two_splits() {
  return {Bipartition{{index(Mode::kFa), index(Mode::kFb)}, {index(Mode::kHa), index(Mode::kHb)}},
          Bipartition{{index(Mode::kFa), index(Mode::kHa)}, {index(Mode::kFb), index(Mode::kHb)}},
          Bipartition{{index(Mode::kFa), index(Mode::kHb)}, {index(Mode::kFb), index(Mode::kHa)}}};
}

PairReport pairwise_negativities(const CovarianceMatrix& v) {
  if (v.n_modes() != 4) throw InvalidArgument("pairwise_negativities needs a four-mode state");
  const auto splits = two_by_two_splits();
  PairReport r;
  r.fa_fb = pair_negativity(v, Mode::kFa, Mode::kFb);
  r.ha_hb = pair_negativity(v, Mode::kHa, Mode::kHb);
  r.fa_ha = pair_negativity(v, Mode::kFa, Mode::kHa);
  r.fa_hb = pair_negativity(v, Mode::kFa, Mode::kHb);
  r.ff_hh = log_negativity(v, splits[0]);
  r.fa_ha_fb_hb = log_negativity(v, splits[1]);
  r.fa_hb_fb_ha = log_negativity(v, splits[2]);
  return r;
}

double hierarchy_margin(const CovarianceMatrix& v) {
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& split : two_by_two_splits()) {
    const double whole = log_negativity(v, split);
    for (int j : split.party_a) {
      for (int k : split.party_b) {
        const double part = log_negativity(reduce(v, {j, k}), Bipartition{{0}, {1}});
        margin = std::min(margin, whole - part);
      }
    }
  }
  return margin;
}

VlfSet default_vlf_set() {
  return {VlfCombination{Mode::kHa, Mode::kFa, {Mode::kFb, Mode::kHb}},
          VlfCombination{Mode::kFa, Mode::kFb, {Mode::kHa, Mode::kHb}},
          VlfCombination{Mode::kFb, Mode::kHb, {Mode::kHa, Mode::kFa}}};
}

std::string describe(const VlfCombination& c) {
  std::ostringstream os;
  os << mode_name(c.first) << ',' << mode_name(c.second) << '|' << mode_name(c.gain_modes[0]) << ','
     << mode_name(c.gain_modes[1]);
  return os.str();
}

VlfCombination parse_vlf_combination(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
  };
  const auto bar = text.find('|');
  if (bar == std::string_view::npos) {
    throw InvalidArgument("VLF combination '" + std::string(text) + "' must look like 'j,k|l,m'");
  }
  auto split_pair = [&](std::string_view s) {
    const auto comma = s.find(',');
    if (comma == std::string_view::npos) {
      throw InvalidArgument("VLF combination '" + std::string(text) + "' must look like 'j,k|l,m'");
    }
    return std::array<Mode, 2>{mode_from_name(trim(s.substr(0, comma))), mode_from_name(trim(s.substr(comma + 1)))};
  };
  const auto pair = split_pair(text.substr(0, bar));
  const auto gains = split_pair(text.substr(bar + 1));
  std::array<int, 4> seen{};
  for (Mode m : {pair[0], pair[1], gains[0], gains[1]}) {
    if (seen[static_cast<std::size_t>(index(m))]++ != 0) {
      throw InvalidArgument("VLF combination '" + std::string(text) + "' repeats a mode");
    }
  }
  return {pair[0], pair[1], gains};
}

bool VlfRow::all_violated() const {
  return std::ranges::all_of(values, [](double x) { return x < kVlfThreshold; });
}

namespace {

double x_difference_variance(const CovarianceMatrix& v, const VlfCombination& c) {
  const int xj = quad_x(c.first), xk = quad_x(c.second);
  return v(xj, xj) + v(xk, xk) - 2.0 * v(xj, xk);
}

}  // namespace

double vlf_value(const CovarianceMatrix& v, const VlfCombination& c, std::array<double, 2> gains) {
  if (v.n_modes() != 4) throw InvalidArgument("vlf_value needs a four-mode state");
  Eigen::Vector4d w(1.0, 1.0, gains[0], gains[1]);
  const std::array<int, 4> idx{quad_y(c.first), quad_y(c.second), quad_y(c.gain_modes[0]),
                               quad_y(c.gain_modes[1])};
  double var_y = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) var_y += w(a) * w(b) * v(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  }
  return x_difference_variance(v, c) + var_y;
}

VlfRow vlf_values(const CovarianceMatrix& v, const VlfSet& set) {
  if (v.n_modes() != 4) throw InvalidArgument("vlf_values needs a four-mode state");
  VlfRow row;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& c = set[i];
    const int yj = quad_y(c.first), yk = quad_y(c.second);
    const int yl = quad_y(c.gain_modes[0]), ym = quad_y(c.gain_modes[1]);
    // Var(Y_j + Y_k + g.Y_gain) is quadratic in g: minimiser solves D g = -b.
    Eigen::Matrix2d d;
    d << v(yl, yl), v(yl, ym), v(ym, yl), v(ym, ym);
    const Eigen::Vector2d b(v(yl, yj) + v(yl, yk), v(ym, yj) + v(ym, yk));
    Eigen::Vector2d g;
    Eigen::LDLT<Eigen::Matrix2d> ldlt(d);
    const double cond_floor = 1e-12 * std::max(1.0, d.cwiseAbs().maxCoeff());
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.vectorD().minCoeff() > cond_floor) {
      g = -ldlt.solve(b);
    } else {
      g = -d.completeOrthogonalDecomposition().solve(b);
      row.used_pseudo_inverse[i] = true;
    }
    row.gains[i] = {g(0), g(1)};
    row.values[i] = vlf_value(v, c, row.gains[i]);
  }
  return row;
}

std::vector<QuadratureVariances> squeezing_variances(const CovarianceMatrix& v) {
  std::vector<QuadratureVariances> out;
  out.reserve(static_cast<std::size_t>(v.n_modes()));
  for (int m = 0; m < v.n_modes(); ++m) {
    const Eigen::Matrix2d blk = v.block(m, m);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(blk, Eigen::EigenvaluesOnly);
    out.push_back({blk(0, 0), blk(1, 1), es.eigenvalues()(0), es.eigenvalues()(1)});
  }
  return out;
}

QuadratureVariances supermode_variances(const CovarianceMatrix& v, int j, int k, int sign) {
  if (sign != 1 && sign != -1) throw InvalidArgument("supermode sign must be +1 or -1");
  if (j == k) throw InvalidArgument("supermode needs two distinct modes");
  const CovarianceMatrix pair = reduce(v, {j, k});
  Eigen::Matrix<double, 2, 4> t = Eigen::Matrix<double, 2, 4>::Zero();
  t(0, 0) = t(1, 1) = (1.0 / std::numbers::sqrt2);
  t(0, 2) = t(1, 3) = sign * (1.0 / std::numbers::sqrt2);
  const Eigen::Matrix2d blk = t * pair.matrix() * t.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(blk, Eigen::EigenvaluesOnly);
  return {blk(0, 0), blk(1, 1), es.eigenvalues()(0), es.eigenvalues()(1)};
}

FidelityFit best_tmsv_fit(const CovarianceMatrix& two_mode, double lo, double hi) {
  if (!(hi > lo)) throw InvalidArgument("best_tmsv_fit: empty search interval");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = fidelity_to_tmsv(two_mode, c);
  double fd = fidelity_to_tmsv(two_mode, d);
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fidelity_to_tmsv(two_mode, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fidelity_to_tmsv(two_mode, d);
    }
  }
  const double r = 0.5 * (a + b);
  return {r, fidelity_to_tmsv(two_mode, r)};
}

double locate_harmonic_minimum(const Trajectory& traj) {
  const std::size_t n = traj.size();
  std::optional<std::size_t> best;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double p = traj[i].state.harmonic_power();
    if (p < traj[i - 1].state.harmonic_power() && p <= traj[i + 1].state.harmonic_power()) {
      if (!best || p < traj[*best].state.harmonic_power()) best = i;
    }
  }
  if (!best) {
    std::ostringstream os;
    os << "no interior harmonic-power minimum in zeta range [" << (n ? traj.front().zeta : 0.0) << ", "
       << (n ? traj.back().zeta : 0.0) << "]";
    throw InvalidArgument(os.str());
  }
  const std::size_t i = *best;
  const double x0 = traj[i - 1].zeta, x1 = traj[i].zeta, x2 = traj[i + 1].zeta;
  const double y0 = traj[i - 1].state.harmonic_power(), y1 = traj[i].state.harmonic_power(),
               y2 = traj[i + 1].state.harmonic_power();
  const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
  const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
  const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
  if (!(a > 0.0)) return x1;
  return std::clamp(-b / (2.0 * a), x0, x2);
}

EprFinding epr_at(double zeta0, double harmonic_power, const CovarianceMatrix& v) {
  if (v.n_modes() != 4) throw InvalidArgument("epr_at needs a four-mode state");
  const CovarianceMatrix vh = reduce(v, {index(Mode::kHa), index(Mode::kHb)});
  EprFinding f;
  f.zeta0 = zeta0;
  f.harmonic_power = harmonic_power;
  f.zero_mean = harmonic_power < kZeroMeanPower;
  f.purity_h = purity(vh);
  f.en_hh = log_negativity(vh, Bipartition{{0}, {1}});
  const FidelityFit fit = best_tmsv_fit(vh);
  f.r_star = fit.r;
  f.fidelity = fit.fidelity;
  f.r_negativity_matched = f.en_hh * std::numbers::ln2 / 2.0;
  f.fidelity_negativity_matched = fidelity_to_tmsv(vh, f.r_negativity_matched);
  const auto local = squeezing_variances(vh);
  f.harmonic_local_min_variance = std::min(local[0].min_variance, local[1].min_variance);
  f.harmonic_supermode_min_variance =
      std::min(supermode_variances(vh, 0, 1, 1).min_variance, supermode_variances(vh, 0, 1, -1).min_variance);
  return f;
}

EprFinding find_epr(const Trajectory& traj, std::span<const CovarianceMatrix> covariances) {
  if (traj.size() != covariances.size()) {
    throw InvalidArgument("find_epr: trajectory and covariance samples differ in length");
  }
  const double zeta0 = locate_harmonic_minimum(traj);
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    if (std::abs(traj[i].zeta - zeta0) < std::abs(traj[nearest].zeta - zeta0)) nearest = i;
  }
  return epr_at(zeta0, traj[nearest].state.harmonic_power(), covariances[nearest]);
}

}  // namespace nlc
