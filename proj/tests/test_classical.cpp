#include "nlc/classical.hpp"
#include "nlc/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace nlc;

namespace {

constexpr double kKappa = 1.13;

// Polar right-hand sides of the coupled-mode equations, written out by hand
// for waveguide a: returns (du_f, u_f dtheta_f, du_h, u_h dtheta_h).
std::array<double, 4> polar_rhs(double uf, double th_f, double uh, double th_h, double vf, double ph_f,
                                double kappa) {
  const double dth = th_h - 2.0 * th_f;
  return {-kappa * vf * std::sin(ph_f - th_f) - uf * uh * std::sin(dth),
          kappa * vf * std::cos(ph_f - th_f) + uf * uh * std::cos(dth), uf * uf * std::sin(dth),
          uf * uf * std::cos(dth)};
}

}  // namespace

TEST_CASE("initial state splits power evenly and seeds the harmonic in phase") {
  const auto s = initial_state(1e-2, 0.3, -0.2);
  CHECK(s.total_power() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::norm(s.a_f) == doctest::Approx(std::norm(s.b_f)));
  CHECK(std::norm(s.a_h) == doctest::Approx(1e-2 * std::norm(s.a_f)));
  CHECK(std::arg(s.a_h) == doctest::Approx(0.3));
  CHECK(std::arg(s.b_f) == doctest::Approx(-0.2));
  CHECK_THROWS_AS(initial_state(-1.0), InvalidArgument);
}

TEST_CASE("Cartesian derivative projects onto the polar equations") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> amp(0.05, 1.0), ph(-3.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    const double uf = amp(rng), vf = amp(rng), uh = amp(rng), vh = amp(rng);
    const double tf = ph(rng), pf = ph(rng), th = ph(rng), phh = ph(rng);
    const ClassicalState s{std::polar(uf, tf), std::polar(vf, pf), std::polar(uh, th), std::polar(vh, phh)};
    const ClassicalState d = derivative(s, kKappa);
    // d(u e^{i theta}) e^{-i theta} = u' + i u theta'
    const cplx pa_f = d.a_f * std::polar(1.0, -tf);
    const cplx pa_h = d.a_h * std::polar(1.0, -th);
    const cplx pb_f = d.b_f * std::polar(1.0, -pf);
    const cplx pb_h = d.b_h * std::polar(1.0, -phh);
    const auto ea = polar_rhs(uf, tf, uh, th, vf, pf, kKappa);
    const auto eb = polar_rhs(vf, pf, vh, phh, uf, tf, kKappa);
    CHECK(std::abs(pa_f.real() - ea[0]) < 1e-12);
    CHECK(std::abs(pa_f.imag() - ea[1]) < 1e-12);
    CHECK(std::abs(pa_h.real() - ea[2]) < 1e-12);
    CHECK(std::abs(pa_h.imag() - ea[3]) < 1e-12);
    CHECK(std::abs(pb_f.real() - eb[0]) < 1e-12);
    CHECK(std::abs(pb_f.imag() - eb[1]) < 1e-12);
    CHECK(std::abs(pb_h.real() - eb[2]) < 1e-12);
    CHECK(std::abs(pb_h.imag() - eb[3]) < 1e-12);
  }
}

TEST_CASE("power is conserved and both guides evolve identically") {
  const auto t = integrate(initial_state(0.0), kKappa, IntegrationGrid{3.5, 1e-3, 10});
  CHECK(t.size() == 351);
  CHECK(t.back().zeta == doctest::Approx(3.5).epsilon(1e-14));
  for (const auto& s : t) {
    CHECK(std::abs(s.state.total_power() - 1.0) < 1e-8);
    CHECK(std::abs(s.state.a_f - s.state.b_f) < 1e-12);
    CHECK(std::abs(s.state.a_h - s.state.b_h) < 1e-12);
  }
}

TEST_CASE("uncoupled guide follows sech/tanh depletion") {
  for (double u0 : {1.0, std::sqrt(0.5), 0.3}) {
    ClassicalState s0;
    s0.a_f = u0;
    const auto t = integrate(s0, 0.0, IntegrationGrid{3.0, 1e-3, 1});
    double worst = 0.0;
    for (const auto& s : t) {
      worst = std::max(worst, std::abs(std::abs(s.state.a_f) - u0 / std::cosh(u0 * s.zeta)));
      worst = std::max(worst, std::abs(std::abs(s.state.a_h) - u0 * std::tanh(u0 * s.zeta)));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("phase mismatch jumps to pi/2 and is undefined for a vanishing field") {
  const auto t = integrate(initial_state(1e-18), kKappa, IntegrationGrid{0.05, 1e-3, 1});
  CHECK(phase_mismatch(t.front().state).a.has_value());
  bool reached = false;
  for (const auto& s : t) {
    const auto m = phase_mismatch(s.state).a;
    if (m && std::abs(*m - std::numbers::pi / 2) < 1e-2) reached = true;
  }
  CHECK(reached);
  const auto z = integrate(initial_state(0.0), kKappa, IntegrationGrid{0.01, 1e-3, 1});
  CHECK_FALSE(phase_mismatch(z.front().state).a.has_value());
  CHECK(phase_mismatch(z.back().state).a.has_value());
}

TEST_CASE("unwrapping removes 2pi jumps and passes undefined samples through") {
  const double pi = std::numbers::pi;
  std::vector<std::optional<double>> w{3.0, -3.0, std::nullopt, -2.9, 3.1};
  const auto u = unwrap_phases(w);
  CHECK(u[0] == doctest::Approx(3.0));
  CHECK(u[1] == doctest::Approx(-3.0 + 2 * pi));
  CHECK(std::isnan(u[2]));
  CHECK(u[3] == doctest::Approx(-2.9 + 2 * pi));
  CHECK(u[4] == doctest::Approx(3.1));
}

TEST_CASE("grid lands exactly on zeta_end") {
  const IntegrationGrid g{1.0, 0.3, 1};
  CHECK(g.n_steps() == 4);
  CHECK(g.effective_step() == doctest::Approx(0.25));
  CHECK(IntegrationGrid{3.5, 1e-3, 10}.n_steps() == 3500);
  CHECK_THROWS_AS((IntegrationGrid{0.0, 1e-3, 1}.validate()), InvalidArgument);
  CHECK_THROWS_AS((IntegrationGrid{1.0, -1.0, 1}.validate()), InvalidArgument);
  CHECK_THROWS_AS((IntegrationGrid{1.0, 1e-3, 0}.validate()), InvalidArgument);
}

TEST_CASE("unit conversions") {
  const auto p = CouplerParams::from_kappa(1.13, 0.08, 0.0025);
  CHECK(p.power_mw == doctest::Approx(400.971).epsilon(1e-5));
  CHECK(p.kappa() == doctest::Approx(1.13).epsilon(1e-14));
  CHECK(zeta_to_z(1.0, 0.0025, p.power_mw) == doctest::Approx(14.125).epsilon(1e-6));
  CHECK(zeta_to_z(1.0, 0.0025, p.power_mw / 2.0) == doctest::Approx(19.976).epsilon(1e-4));
  // doubling the power divides kappa by sqrt2
  CHECK(kappa_from_physical(0.08, 0.0025, 2.0 * p.power_mw) == doctest::Approx(1.13 / std::numbers::sqrt2));
  CHECK_THROWS_AS(kappa_from_physical(0.08, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(zeta_to_z(1.0, 0.0025, -1.0), InvalidArgument);
}

TEST_CASE("Richardson check: fourth order at moderate steps, degraded at 0.1") {
  const auto fine = richardson_check(initial_state(0.0), kKappa, 3.5, 1e-3);
  CHECK_FALSE(fine.degraded);
  const auto order = richardson_check(initial_state(0.0), kKappa, 3.5, 0.05);
  CHECK(order.observed_order == doctest::Approx(4.0).epsilon(0.1));
  const auto coarse = richardson_check(initial_state(0.0), kKappa, 3.5, 0.1);
  CHECK(coarse.degraded);
}

TEST_CASE("integration aborts with the zeta reached on blow-up") {
  ClassicalState huge;
  huge.a_f = 1e200;
  try {
    integrate(huge, kKappa, IntegrationGrid{1.0, 1e-2, 1});
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.zeta() > 0.0);
    CHECK(std::string(e.what()).find("zeta") != std::string::npos);
  }
}
