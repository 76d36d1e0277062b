#include "nlc/devices.hpp"

#include "nlc/errors.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace nlc {

namespace {

constexpr int kFinalOnly = 1 << 30;

ClassicalState scale_fields(const ClassicalState& s, std::span<const double> etas) {
  return {s.a_f * std::sqrt(etas[0]), s.b_f * std::sqrt(etas[1]), s.a_h * std::sqrt(etas[2]),
          s.b_h * std::sqrt(etas[3])};
}

}  // namespace

void CouplerDevice::validate() const {
  (void)params.kappa();  // throws on non-positive C, g, P
  if (!(power_ratio >= 0.0) || !std::isfinite(power_ratio)) throw InvalidArgument("power_ratio must be >= 0");
  grid.validate();
  loss.validate();
  if (!(defect_limit > 0.0)) throw InvalidArgument("defect_limit must be positive");
  if (!(richardson_tolerance > 0.0)) throw InvalidArgument("richardson_tolerance must be positive");
}

CouplerReport run_coupler(const CouplerDevice& d) {
  d.validate();
  CouplerReport rep;
  rep.device = d;
  rep.kappa = d.params.kappa();
  const ClassicalState s0 = initial_state(d.power_ratio, d.theta_f0, d.phi_f0);
  const Propagation prop = propagate(s0, rep.kappa, d.grid, d.propagator, d.defect_limit);
  rep.max_defect = prop.max_defect;

  rep.samples.reserve(prop.samples.size());
  for (const auto& q : prop.samples) {
    CouplerSample s;
    s.zeta = q.zeta;
    s.z_mm = zeta_to_z(q.zeta, d.params.nonlinearity, d.params.power_mw);
    s.state = q.state;
    s.v = q.covariance;
    s.pairs = pairwise_negativities(s.v);
    s.vlf = vlf_values(s.v, d.vlf);
    s.hierarchy_margin = hierarchy_margin(s.v);
    if (d.loss.lossless()) {
      s.lossy_state = s.state;
      s.v_lossy = s.v;
      s.pairs_lossy = s.pairs;
    } else {
      const auto etas = coupler_etas(d.loss, s.z_mm / 10.0);
      s.lossy_state = scale_fields(s.state, etas);
      s.v_lossy = apply_loss(s.v, etas);
      s.pairs_lossy = pairwise_negativities(s.v_lossy);
    }
    rep.samples.push_back(std::move(s));
  }

  try {
    const double zeta0 = locate_harmonic_minimum(prop.trajectory());
    const IntegrationGrid to_zeta0{zeta0, d.grid.step, kFinalOnly};
    const Propagation at = propagate(s0, rep.kappa, to_zeta0, d.propagator, d.defect_limit);
    const QuantumSample& last = at.samples.back();
    rep.epr = epr_at(zeta0, last.state.harmonic_power(), last.covariance);
  } catch (const InvalidArgument& e) {
    rep.epr_note = e.what();
  }

  rep.richardson = richardson_check(s0, rep.kappa, d.grid.zeta_end, d.grid.step, d.richardson_tolerance);
  return rep;
}

ShgReport run_single_shg(double power_mw, double nonlinearity, const IntegrationGrid& grid, Propagator scheme) {
  if (!(power_mw > 0.0) || !(nonlinearity > 0.0)) {
    throw InvalidArgument("run_single_shg: power and g must be positive");
  }
  ClassicalState s0;
  s0.a_f = 1.0;
  const Propagation prop = propagate(s0, 0.0, grid, scheme);
  ShgReport rep;
  rep.power_mw = power_mw;
  rep.nonlinearity = nonlinearity;
  rep.max_defect = prop.max_defect;
  rep.samples.reserve(prop.samples.size());
  for (const auto& q : prop.samples) {
    rep.samples.push_back({q.zeta, zeta_to_z(q.zeta, nonlinearity, power_mw), q.state.a_f, q.state.a_h,
                           phase_mismatch(q.state).a,
                           reduce(q.covariance, {index(Mode::kFa), index(Mode::kHa)})});
  }
  return rep;
}

Mat8 linear_coupler_transfer(double coupling, double z_mm) {
  const double c = std::cos(coupling * z_mm);
  const double s = std::sin(coupling * z_mm);
  Mat8 t = Mat8::Identity();
  const int xa = quad_x(Mode::kFa), ya = quad_y(Mode::kFa);
  const int xb = quad_x(Mode::kFb), yb = quad_y(Mode::kFb);
  t(xa, xa) = c;
  t(xa, yb) = -s;
  t(ya, ya) = c;
  t(ya, xb) = s;
  t(xb, xb) = c;
  t(xb, ya) = -s;
  t(yb, yb) = c;
  t(yb, xa) = s;
  return t;
}

CovarianceMatrix run_linear_coupler(const CovarianceMatrix& v0, double coupling, double z_mm) {
  if (v0.n_modes() != 4) throw InvalidArgument("run_linear_coupler needs a four-mode state");
  return transform(v0, linear_coupler_transfer(coupling, z_mm));
}

std::vector<CovarianceMatrix> run_linear_coupler(const CovarianceMatrix& v0, double coupling,
                                                 std::span<const double> z_mm) {
  std::vector<CovarianceMatrix> out;
  out.reserve(z_mm.size());
  for (double z : z_mm) out.push_back(run_linear_coupler(v0, coupling, z));
  return out;
}

double beat_length(double coupling) {
  if (!(coupling > 0.0) || !std::isfinite(coupling)) throw InvalidArgument("beat_length: C must be positive");
  return std::numbers::pi / (2.0 * coupling);
}

void TwoModeSqueezerDevice::validate() const {
  if (!(stage1_length_mm >= 0.0) || !(coupler_length_mm >= 0.0)) {
    throw InvalidArgument("stage lengths must be >= 0");
  }
  if (!(nonlinearity > 0.0) || !(power_per_waveguide_mw > 0.0) || !(coupling > 0.0)) {
    throw InvalidArgument("g, power per waveguide and C must be positive");
  }
  if (coupler_points < 2) throw InvalidArgument("coupler_points must be >= 2");
  if (!(step > 0.0)) throw InvalidArgument("integration step must be positive");
}

double TwoModeSqueezerDevice::stage1_zeta() const {
  return stage1_length_mm * std::sqrt(2.0 * power_per_waveguide_mw) * nonlinearity;
}

SqueezerReport run_two_mode_squeezer(const TwoModeSqueezerDevice& d) {
  d.validate();
  SqueezerReport rep;
  rep.device = d;
  rep.stage1.power_mw = d.power_per_waveguide_mw;
  rep.stage1.nonlinearity = d.nonlinearity;

  CovarianceMatrix single = vacuum_cm(2);
  const double zeta1 = d.stage1_zeta();
  if (zeta1 > 0.0) {
    rep.stage1 = run_single_shg(d.power_per_waveguide_mw, d.nonlinearity, IntegrationGrid{zeta1, d.step, 10},
                                d.propagator);
    single = rep.stage1.samples.back().v;
  } else {
    ShgSample s;
    s.a_f = 1.0;
    rep.stage1.samples.push_back(s);
  }
  // (f_a, h_a) + (f_b, h_b) -> (f_a, f_b, h_a, h_b)
  rep.input = reduce(direct_sum(single, single), {0, 2, 1, 3});

  rep.samples.reserve(static_cast<std::size_t>(d.coupler_points));
  for (int k = 0; k < d.coupler_points; ++k) {
    SqueezerSample s;
    s.z_mm = d.coupler_length_mm * k / (d.coupler_points - 1);
    s.v = run_linear_coupler(rep.input, d.coupling, s.z_mm);
    s.pairs = pairwise_negativities(s.v);
    s.vlf = vlf_values(s.v, d.vlf);
    rep.samples.push_back(std::move(s));
  }
  return rep;
}

std::string_view to_string(Figure f) {
  static constexpr std::array<std::string_view, 7> names{"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"};
  return names[static_cast<std::size_t>(f)];
}

Figure figure_from_string(std::string_view s) {
  for (int i = 0; i < 7; ++i) {
    const auto f = static_cast<Figure>(i);
    if (to_string(f) == s) return f;
  }
  throw InvalidArgument("unknown figure tag '" + std::string(s) + "' (expected fig2 .. fig8)");
}

bool is_coupler_figure(Figure f) { return f != Figure::kFig7 && f != Figure::kFig8; }

CouplerDevice coupler_preset(Figure f) {
  if (!is_coupler_figure(f)) {
    throw InvalidArgument(std::string(to_string(f)) + " is not a coupler figure");
  }
  CouplerDevice d;
  if (f == Figure::kFig5) {
    d.loss.gamma_f = 0.14;
    d.loss.gamma_h = 0.55;
  }
  return d;
}

TwoModeSqueezerDevice squeezer_preset() { return TwoModeSqueezerDevice{}; }

CouplerDevice doubled_power(const CouplerDevice& d) {
  CouplerDevice out = d;
  out.params.power_mw *= 2.0;
  out.grid.zeta_end *= std::numbers::sqrt2;
  return out;
}

}  // namespace nlc
