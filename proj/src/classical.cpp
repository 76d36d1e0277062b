#include "nlc/classical.hpp"

#include "nlc/errors.hpp"
#include "nlc/rk4.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nlc {

namespace {

constexpr cplx kI{0.0, 1.0};

double wrap_angle(double x) {
  // (-pi, pi]
  double y = std::remainder(x, 2.0 * std::numbers::pi);
  if (y <= -std::numbers::pi) y += 2.0 * std::numbers::pi;
  return y;
}

std::optional<double> mismatch(cplx harmonic, cplx fundamental) {
  if (std::abs(harmonic) < kPhaseEpsilon || std::abs(fundamental) < kPhaseEpsilon) return std::nullopt;
  return wrap_angle(std::arg(harmonic) - 2.0 * std::arg(fundamental));
}

double max_abs_diff(const ClassicalState& x, const ClassicalState& y) {
  return std::max({std::abs(x.a_f - y.a_f), std::abs(x.b_f - y.b_f), std::abs(x.a_h - y.a_h),
                   std::abs(x.b_h - y.b_h)});
}

ClassicalState final_state(const ClassicalState& s0, double kappa, double zeta_end, double step) {
  IntegrationGrid grid{zeta_end, step, 1 << 30};
  return integrate(s0, kappa, grid).back().state;
}

}  // namespace

bool ClassicalState::all_finite() const {
  for (cplx v : {a_f, b_f, a_h, b_h}) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

ClassicalState& ClassicalState::operator+=(const ClassicalState& o) {
  a_f += o.a_f;
  b_f += o.b_f;
  a_h += o.a_h;
  b_h += o.b_h;
  return *this;
}

ClassicalState& ClassicalState::operator*=(double s) {
  a_f *= s;
  b_f *= s;
  a_h *= s;
  b_h *= s;
  return *this;
}

double CouplerParams::kappa() const { return kappa_from_physical(coupling, nonlinearity, power_mw); }

double CouplerParams::zeta_per_mm() const { return std::sqrt(2.0 * power_mw) * nonlinearity; }

CouplerParams CouplerParams::from_kappa(double kappa, double coupling, double nonlinearity) {
  if (!(kappa > 0.0) || !(coupling > 0.0) || !(nonlinearity > 0.0)) {
    throw InvalidArgument("from_kappa: kappa, C and g must be positive");
  }
  const double root = coupling / (kappa * nonlinearity);  // sqrt(2P)
  return {coupling, nonlinearity, 0.5 * root * root};
}

void IntegrationGrid::validate() const {
  if (!(zeta_end > 0.0) || !std::isfinite(zeta_end)) throw InvalidArgument("zeta_end must be positive");
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidArgument("integration step must be positive");
  if (stride < 1) throw InvalidArgument("output stride must be >= 1");
}

long IntegrationGrid::n_steps() const { return std::max(1L, std::lround(std::ceil(zeta_end / step - 1e-9))); }

double IntegrationGrid::effective_step() const { return zeta_end / static_cast<double>(n_steps()); }

ClassicalState initial_state(double power_ratio, double theta_f0, double phi_f0) {
  if (!(power_ratio >= 0.0) || !std::isfinite(power_ratio)) {
    throw InvalidArgument("harmonic/fundamental power ratio must be >= 0");
  }
  const double uf = std::sqrt(0.5 / (1.0 + power_ratio));
  const double uh = std::sqrt(power_ratio) * uf;
  return {std::polar(uf, theta_f0), std::polar(uf, phi_f0), std::polar(uh, theta_f0),
          std::polar(uh, phi_f0)};
}

ClassicalState derivative(const ClassicalState& s, double kappa) {
  return {kI * kappa * s.b_f + kI * s.a_h * std::conj(s.a_f),
          kI * kappa * s.a_f + kI * s.b_h * std::conj(s.b_f), kI * s.a_f * s.a_f, kI * s.b_f * s.b_f};
}

Trajectory integrate(const ClassicalState& s0, double kappa, const IntegrationGrid& grid) {
  grid.validate();
  if (!s0.all_finite()) throw InvalidArgument("initial state is not finite");
  const long n = grid.n_steps();
  const double h = grid.effective_step();
  auto rhs = [kappa](const ClassicalState& s) { return derivative(s, kappa); };

  Trajectory out;
  out.reserve(static_cast<std::size_t>(n / grid.stride + 2));
  out.push_back({0.0, s0});
  ClassicalState s = s0;
  for (long i = 1; i <= n; ++i) {
    s = rk4_step(s, h, rhs);
    const double zeta = static_cast<double>(i) * h;
    if (!s.all_finite()) throw NumericalError("classical integration produced non-finite amplitudes", zeta);
    if (i % grid.stride == 0 || i == n) out.push_back({zeta, s});
  }
  return out;
}

PhaseMismatch phase_mismatch(const ClassicalState& s) {
  return {mismatch(s.a_h, s.a_f), mismatch(s.b_h, s.b_f)};
}

std::vector<double> unwrap_phases(std::span<const std::optional<double>> wrapped) {
  std::vector<double> out;
  out.reserve(wrapped.size());
  std::optional<double> last;
  double offset = 0.0;
  for (const auto& w : wrapped) {
    if (!w) {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    if (last) {
      const double jump = *w - *last;
      if (jump > std::numbers::pi) offset -= 2.0 * std::numbers::pi;
      if (jump < -std::numbers::pi) offset += 2.0 * std::numbers::pi;
    }
    last = w;
    out.push_back(*w + offset);
  }
  return out;
}

double kappa_from_physical(double coupling, double nonlinearity, double power_mw) {
  if (!(coupling > 0.0) || !(nonlinearity > 0.0) || !(power_mw > 0.0)) {
    throw InvalidArgument("kappa: C, g and P must all be positive");
  }
  return coupling / (std::sqrt(2.0 * power_mw) * nonlinearity);
}

double zeta_to_z(double zeta, double nonlinearity, double power_mw) {
  if (!(nonlinearity > 0.0) || !(power_mw > 0.0)) {
    throw InvalidArgument("zeta_to_z: g and P must be positive");
  }
  return zeta / (std::sqrt(2.0 * power_mw) * nonlinearity);
}

RichardsonReport richardson_check(const ClassicalState& s0, double kappa, double zeta_end,
                                  double step, double tolerance) {
  const ClassicalState y1 = final_state(s0, kappa, zeta_end, step);
  const ClassicalState y2 = final_state(s0, kappa, zeta_end, step / 2.0);
  const ClassicalState y4 = final_state(s0, kappa, zeta_end, step / 4.0);
  const double e1 = max_abs_diff(y1, y2);
  const double e2 = max_abs_diff(y2, y4);
  RichardsonReport r;
  r.step = step;
  // y(h) - y(h/2) = (1 - 2^-4) C h^4 for a fourth-order method.
  r.error_estimate = e1 * 16.0 / 15.0;
  r.observed_order = (e2 > 0.0 && e1 > 0.0) ? std::log2(e1 / e2) : 0.0;
  r.degraded = r.error_estimate > tolerance;
  return r;
}

}  // namespace nlc
