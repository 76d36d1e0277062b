#include "nlc/errors.hpp"
#include "nlc/gaussian.hpp"
#include "nlc/selfcheck.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <numbers>
#include <random>
#include <sstream>

using namespace nlc;
using nlc::test::max_abs;

TEST_CASE("vacuum is pure with unit symplectic spectrum") {
  const auto v = vacuum_cm(3);
  CHECK(v.n_modes() == 3);
  for (double nu : symplectic_eigenvalues(v)) CHECK(nu == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(purity(v) == doctest::Approx(1.0));
  CHECK(is_physical(v));
  CHECK_THROWS_AS(vacuum_cm(0), InvalidArgument);
}

TEST_CASE("covariance construction rejects malformed matrices") {
  CHECK_THROWS_AS(CovarianceMatrix(Eigen::MatrixXd::Identity(3, 3)), InvalidArgument);
  CHECK_THROWS_AS(CovarianceMatrix(Eigen::MatrixXd::Identity(2, 4)), InvalidArgument);
  Eigen::MatrixXd asym = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  asym(0, 1) = 0.1;
  CHECK_THROWS_AS(CovarianceMatrix{asym}, InvalidArgument);
  Eigen::MatrixXd nan = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  nan(0, 0) = std::nan("");
  CHECK_THROWS_AS(CovarianceMatrix{nan}, InvalidArgument);
}

TEST_CASE("sub-vacuum state is rejected with a diagnostic") {
  const CovarianceMatrix bad(0.3 * Eigen::MatrixXd::Identity(2, 2));
  CHECK_FALSE(is_physical(bad));
  CHECK_THROWS_AS(require_physical(bad), InvalidState);
  CHECK_THROWS_AS(log_negativity(CovarianceMatrix(0.3 * Eigen::MatrixXd::Identity(4, 4)), Bipartition{{0}, {1}}),
                  InvalidState);
}

TEST_CASE("two-mode squeezed vacuum negativity is 2r/ln2 bits") {
  for (double r : {0.0, 0.05, 0.11, 0.5, 1.2}) {
    const auto v = tmsv_cm(r);
    CHECK(is_physical(v));
    CHECK(purity(v) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(log_negativity(v, Bipartition{{0}, {1}}) == doctest::Approx(2.0 * r / std::numbers::ln2).epsilon(1e-10));
  }
  // r = 0.11 gives about 1/3
  CHECK(log_negativity(tmsv_cm(0.11), Bipartition{{0}, {1}}) == doctest::Approx(0.3174).epsilon(1e-3));
}

TEST_CASE("thermal state: purity and symplectic eigenvalue") {
  const double n = 0.7;
  const CovarianceMatrix th((n + 0.5) * Eigen::MatrixXd::Identity(2, 2));
  CHECK(symplectic_eigenvalues(th)[0] == doctest::Approx(n + 0.5));
  CHECK(purity(th) == doctest::Approx(1.0 / (2.0 * n + 1.0)));
}

TEST_CASE("fidelity formula is one for a matching squeezed vacuum and peaks at the true r") {
  for (double r : {0.0, 0.1, 0.4}) {
    CHECK(fidelity_to_tmsv(tmsv_cm(r), r) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fidelity_to_tmsv(tmsv_cm(r), r + 0.05) < 1.0);
  }
  CHECK_THROWS_AS(fidelity_to_tmsv(vacuum_cm(3), 0.1), InvalidArgument);
}

TEST_CASE("partial transpose is an involution and either side gives the same negativity") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    const int n = 2 + k % 3;
    const auto v = random_mixed_state(n, rng);
    Bipartition p{{0}, {}};
    for (int m = 1; m < n; ++m) p.party_b.push_back(m);
    CHECK(max_abs(partial_transpose(partial_transpose(v, p), p).matrix() - v.matrix()) == 0.0);
    CHECK(log_negativity(v, p) == doctest::Approx(log_negativity(v, p.swapped())).epsilon(1e-9));
  }
}

TEST_CASE("bipartition validation") {
  const auto v = vacuum_cm(3);
  CHECK_THROWS_AS(partial_transpose(v, Bipartition{{0}, {0}}), InvalidArgument);
  CHECK_THROWS_AS(partial_transpose(v, Bipartition{{0}, {5}}), InvalidArgument);
  CHECK_THROWS_AS(log_negativity(v, Bipartition{{0}, {1}}), InvalidArgument);  // mode 2 missing
  CHECK_THROWS_AS(log_negativity(v, Bipartition{{}, {0, 1, 2}}), InvalidArgument);
}

TEST_CASE("reduce keeps the requested order and composes") {
  std::mt19937_64 rng(11);
  const auto v = random_mixed_state(4, rng);
  const auto r = reduce(v, {3, 1});
  CHECK(max_abs(r.block(0, 0) - v.block(3, 3)) == 0.0);
  CHECK(max_abs(r.block(0, 1) - v.block(3, 1)) == 0.0);
  // reduce o reduce = reduce onto the intersection
  const auto twice = reduce(reduce(v, {0, 2, 3}), {1, 2});
  CHECK(max_abs(twice.matrix() - reduce(v, {2, 3}).matrix()) == 0.0);
  CHECK_THROWS_AS(reduce(v, {1, 1}), InvalidArgument);
  CHECK_THROWS_AS(reduce(v, {4}), InvalidArgument);
  CHECK_THROWS_AS(reduce(v, std::span<const int>{}), InvalidArgument);
}

TEST_CASE("symplectic transform preserves the spectrum") {
  std::mt19937_64 rng(3);
  const auto v = random_mixed_state(3, rng);
  const auto pure = random_pure_state(3, rng);
  for (double nu : symplectic_eigenvalues(pure)) CHECK(nu == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(purity(pure) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(purity(v) <= 1.0 + 1e-9);
}

TEST_CASE("direct sum places the second block after the first") {
  const auto s = direct_sum(tmsv_cm(0.3), vacuum_cm(1));
  CHECK(s.n_modes() == 3);
  CHECK(max_abs(s.block(2, 2) - 0.5 * Eigen::Matrix2d::Identity()) == 0.0);
  CHECK(max_abs(s.block(0, 2)) == 0.0);
}

TEST_CASE("covariance CSV round-trips exactly") {
  std::mt19937_64 rng(5);
  const std::vector<std::string> names{"fa", "fb", "ha", "hb"};
  for (int k = 0; k < 10; ++k) {
    const auto v = random_mixed_state(4, rng);
    std::stringstream ss;
    write_cm_csv(ss, v, names);
    if (k == 0) {
      std::string header;
      std::getline(std::stringstream(ss.str()), header);
      CHECK(header == "X_fa,Y_fa,X_fb,Y_fb,X_ha,Y_ha,X_hb,Y_hb");
    }
    const auto back = read_cm_csv(ss);
    CHECK(max_abs(back.matrix() - v.matrix()) == 0.0);
  }
}
