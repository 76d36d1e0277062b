#include "nlc/entanglement.hpp"
#include "nlc/errors.hpp"
#include "nlc/selfcheck.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace nlc;

TEST_CASE("vacuum: no entanglement and every VLF value is 2 at zero gains") {
  const auto p = pairwise_negativities(vacuum_cm(4));
  for (double e : {p.fa_fb, p.ha_hb, p.fa_ha, p.fa_hb, p.ff_hh, p.fa_ha_fb_hb, p.fa_hb_fb_ha}) CHECK(e == 0.0);
  const auto row = vlf_values(vacuum_cm(4), default_vlf_set());
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(row.values[i] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(std::abs(row.gains[i][0]) < 1e-15);
    CHECK(std::abs(row.gains[i][1]) < 1e-15);
    CHECK_FALSE(row.used_pseudo_inverse[i]);
  }
  CHECK_FALSE(row.all_violated());
}

TEST_CASE("pair negativities pick the right modes") {
  // squeezed vacuum between h_a and h_b only
  const CovarianceMatrix v = reduce(direct_sum(vacuum_cm(2), tmsv_cm(0.2)), {0, 1, 2, 3});
  const auto p = pairwise_negativities(v);
  CHECK(p.ha_hb > 0.5);
  CHECK(p.fa_fb == 0.0);
  CHECK(p.fa_ha == 0.0);
  CHECK(p.ff_hh == 0.0);  // both harmonics on one side
  CHECK(p.fa_ha_fb_hb == doctest::Approx(p.ha_hb));
  CHECK_THROWS_AS(pairwise_negativities(vacuum_cm(3)), InvalidArgument);
}

TEST_CASE("optimal VLF gains are stationary") {
  const auto& r = test::default_run();
  const auto set = default_vlf_set();
  for (double zeta : {0.3, 1.0, 2.1, 3.0}) {
    const auto& s = test::nearest(r, zeta);
    for (std::size_t i = 0; i < 3; ++i) {
      const double best = s.vlf.values[i];
      for (int k = 0; k < 2; ++k) {
        for (double d : {-1e-3, 1e-3}) {
          auto g = s.vlf.gains[i];
          g[static_cast<std::size_t>(k)] += d;
          CHECK(vlf_value(s.v, set[i], g) >= best);
        }
      }
    }
  }
}

TEST_CASE("VLF values stay at or above 2 on separable products") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ud(0.0, 1.5);
  const auto set = default_vlf_set();
  for (int k = 0; k < 30; ++k) {
    // a squeezed pair on two modes, vacuum on the other two: separable across
    // at least one cut, so not all three inequalities can be violated
    const std::array<std::array<int, 4>, 3> layouts{{{0, 1, 2, 3}, {2, 3, 0, 1}, {0, 2, 1, 3}}};
    const auto& order = layouts[static_cast<std::size_t>(k % 3)];
    const auto v = reduce(direct_sum(tmsv_cm(ud(rng)), vacuum_cm(2)), {order[0], order[1], order[2], order[3]});
    const auto row = vlf_values(v, set);
    CHECK_FALSE(row.all_violated());
    double largest = 0.0;
    for (double x : row.values) largest = std::max(largest, x);
    CHECK(largest >= 2.0 - 1e-12);
  }
}

TEST_CASE("mirror-image VLF combinations agree along the symmetric coupler") {
  for (const auto& s : test::default_run().samples) {
    CHECK(std::abs(s.vlf.values[0] - s.vlf.values[2]) < 1e-9);
  }
}

TEST_CASE("VLF combination parsing") {
  const auto c = parse_vlf_combination("h_a, f_a | f_b, hb");
  CHECK(c.first == Mode::kHa);
  CHECK(c.second == Mode::kFa);
  CHECK(c.gain_modes[1] == Mode::kHb);
  CHECK(describe(c) == "h_a,f_a|f_b,h_b");
  CHECK_THROWS_AS(parse_vlf_combination("f_a,f_b"), InvalidArgument);
  CHECK_THROWS_AS(parse_vlf_combination("f_a,f_a|h_a,h_b"), InvalidArgument);
  CHECK_THROWS_AS(parse_vlf_combination("f_a,f_b|h_a,q"), InvalidArgument);
}

TEST_CASE("singular gain block falls back to the pseudo-inverse") {
  Eigen::MatrixXd m = vacuum_cm(4).matrix();
  // make Y of the two gain modes of the second combination identical
  const int yl = quad_y(Mode::kHa), ym = quad_y(Mode::kHb);
  m(yl, ym) = m(ym, yl) = 0.5;
  const auto row = vlf_values(CovarianceMatrix(m), default_vlf_set());
  CHECK(row.used_pseudo_inverse[1]);
  CHECK(std::isfinite(row.values[1]));
}

TEST_CASE("tracing one mode from each side never increases negativity") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 30; ++k) CHECK(hierarchy_margin(random_pure_state(4, rng)) >= 0.0);
  for (const auto& s : test::default_run().samples) CHECK(s.hierarchy_margin >= 0.0);
}

TEST_CASE("reduced squeezed vacuum is thermal") {
  const double r = 0.4;
  const auto var = squeezing_variances(reduce(tmsv_cm(r), {0}));
  CHECK(var[0].var_x == doctest::Approx(std::cosh(2 * r) / 2));
  CHECK(var[0].var_y == doctest::Approx(std::cosh(2 * r) / 2));
  CHECK_FALSE(var[0].squeezed());
  // the EPR combinations of the same state are squeezed
  CHECK(supermode_variances(tmsv_cm(r), 0, 1, -1).var_x == doctest::Approx(std::exp(-2 * r) / 2));
  CHECK_THROWS_AS(supermode_variances(tmsv_cm(r), 0, 1, 2), InvalidArgument);
}

TEST_CASE("golden-section fit recovers a known squeezing") {
  for (double r : {0.0, 0.11, 0.7}) {
    const auto fit = best_tmsv_fit(tmsv_cm(r));
    CHECK(fit.r == doctest::Approx(r).epsilon(1e-6));
    CHECK(fit.fidelity == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("EPR finding on the default coupler") {
  const auto& r = test::default_run();
  REQUIRE(r.epr.has_value());
  const auto& e = *r.epr;
  CHECK(e.zeta0 == doctest::Approx(2.166).epsilon(2e-3));
  CHECK(e.zero_mean);
  CHECK(e.harmonic_power < kZeroMeanPower);
  // r* is a local maximum of the fidelity
  const auto& s = test::nearest(r, e.zeta0);
  const auto vh = reduce(s.v, {index(Mode::kHa), index(Mode::kHb)});
  const auto fit = best_tmsv_fit(vh);
  CHECK(fidelity_to_tmsv(vh, fit.r + 0.005) <= fit.fidelity);
  CHECK(fidelity_to_tmsv(vh, std::max(0.0, fit.r - 0.005)) <= fit.fidelity);
  // sampled and re-propagated answers agree closely
  std::vector<CovarianceMatrix> vs;
  Trajectory traj;
  for (const auto& x : r.samples) {
    vs.push_back(x.v);
    traj.push_back({x.zeta, x.state});
  }
  const auto sampled = find_epr(traj, vs);
  CHECK(sampled.zeta0 == doctest::Approx(e.zeta0).epsilon(1e-9));
  CHECK(sampled.purity_h == doctest::Approx(e.purity_h).epsilon(1e-3));
}

TEST_CASE("no harmonic minimum means no EPR finding") {
  Trajectory flat;
  for (int i = 0; i < 10; ++i) flat.push_back({0.1 * i, ClassicalState{{0.7, 0}, {0.7, 0}, {}, {}}});
  try {
    locate_harmonic_minimum(flat);
    FAIL("expected InvalidArgument");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("[0, 0.9") != std::string::npos);
  }
  std::vector<CovarianceMatrix> vs(flat.size(), vacuum_cm(4));
  CHECK_THROWS_AS(find_epr(flat, vs), InvalidArgument);
  vs.pop_back();
  CHECK_THROWS_AS(find_epr(flat, vs), InvalidArgument);
}
