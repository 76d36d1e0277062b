#include "nlc/selfcheck.hpp"

#include "nlc/classical.hpp"
#include "nlc/config.hpp"
#include "nlc/devices.hpp"
#include "nlc/entanglement.hpp"
#include "nlc/errors.hpp"
#include "nlc/loss.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace nlc {

namespace {

constexpr double kKappa = 1.13;

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

Eigen::MatrixXd random_symplectic(int n, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  Eigen::MatrixXd h(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i) {
    for (int j = i; j < 2 * n; ++j) h(i, j) = h(j, i) = nd(rng);
  }
  const Eigen::MatrixXd gen = symplectic_form(n) * h;
  return gen.exp();
}

std::vector<Bipartition> all_bipartitions(int n) {
  std::vector<Bipartition> out;
  for (int mask = 1; mask < (1 << n) - 1; ++mask) {
    if (mask & 1) {  // mode 0 always in party_a; swapped partitions tested separately
      Bipartition p;
      for (int m = 0; m < n; ++m) ((mask >> m) & 1 ? p.party_a : p.party_b).push_back(m);
      out.push_back(p);
    }
  }
  return out;
}

CheckResult power_conservation(const SelfcheckOptions& o) {
  const Trajectory t = integrate(initial_state(0.0), kKappa, IntegrationGrid{3.5, o.step, 10});
  double worst = 0.0;
  for (const auto& s : t) worst = std::max(worst, std::abs(s.state.total_power() - 1.0));
  return {"power conservation", worst < 1e-8, "max |sum - 1| = " + sci(worst)};
}

CheckResult symplecticity(const SelfcheckOptions& o) {
  try {
    const Propagation p = propagate(initial_state(0.0), kKappa, IntegrationGrid{3.5, o.step, 10},
                                    Propagator::kGeneratorExponential, std::numeric_limits<double>::infinity(),
                                    o.drift);
    double worst = p.max_defect;
    for (const auto& s : p.samples) worst = std::max(worst, symplecticity_defect(s.transfer));
    return {"transfer matrix symplecticity", worst < 1e-8, "max |S Omega S^T - Omega| = " + sci(worst)};
  } catch (const std::exception& e) {
    return {"transfer matrix symplecticity", false, e.what()};
  }
}

CheckResult global_purity(const SelfcheckOptions& o) {
  const Propagation p = propagate(initial_state(0.0), kKappa, IntegrationGrid{3.5, o.step, 10});
  double worst = 0.0;
  for (const auto& s : p.samples) {
    for (double nu : symplectic_eigenvalues(s.covariance)) worst = std::max(worst, std::abs(nu - kVacuumVariance));
  }
  return {"lossless state stays pure", worst < 1e-6, "max |nu - 1/2| = " + sci(worst)};
}

CheckResult shg_oracle(const SelfcheckOptions& o) {
  ClassicalState s0;
  s0.a_f = 1.0;
  const Trajectory t = integrate(s0, 0.0, IntegrationGrid{3.0, o.step, 1});
  double worst = 0.0;
  for (const auto& s : t) {
    worst = std::max(worst, std::abs(std::abs(s.state.a_f) - 1.0 / std::cosh(s.zeta)));
    worst = std::max(worst, std::abs(std::abs(s.state.a_h) - std::tanh(s.zeta)));
  }
  return {"analytic SHG (sech/tanh)", worst < 1e-6, "max error = " + sci(worst)};
}

CheckResult pt_involution(const SelfcheckOptions& o, std::mt19937_64& rng) {
  double worst = 0.0;
  for (int k = 0; k < o.random_trials; ++k) {
    const int n = 2 + k % 3;
    const CovarianceMatrix v = random_mixed_state(n, rng);
    for (const auto& p : all_bipartitions(n)) {
      const CovarianceMatrix twice = partial_transpose(partial_transpose(v, p), p);
      worst = std::max(worst, (twice.matrix() - v.matrix()).cwiseAbs().maxCoeff());
    }
  }
  return {"partial transpose involution", worst == 0.0, "max deviation = " + sci(worst)};
}

CheckResult swap_symmetry(const SelfcheckOptions& o, std::mt19937_64& rng) {
  double worst = 0.0;
  for (int k = 0; k < o.random_trials; ++k) {
    const int n = 2 + k % 3;
    const CovarianceMatrix v = random_mixed_state(n, rng);
    for (const auto& p : all_bipartitions(n)) {
      worst = std::max(worst, std::abs(log_negativity(v, p) - log_negativity(v, p.swapped())));
    }
  }
  return {"negativity party swap", worst < 1e-9, "max |E(A|B) - E(B|A)| = " + sci(worst)};
}

CheckResult channel_composition(const SelfcheckOptions& o, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ud(0.05, 1.0);
  double worst = 0.0, min_nu = std::numeric_limits<double>::infinity();
  for (int k = 0; k < o.random_trials; ++k) {
    const int n = 1 + k % 4;
    const CovarianceMatrix v = random_mixed_state(n, rng);
    std::vector<double> e1(static_cast<std::size_t>(n)), e2(e1.size()), e12(e1.size());
    for (std::size_t i = 0; i < e1.size(); ++i) {
      e1[i] = ud(rng);
      e2[i] = ud(rng);
      e12[i] = e1[i] * e2[i];
    }
    const CovarianceMatrix twice = apply_loss(apply_loss(v, e1), e2);
    const CovarianceMatrix once = apply_loss(v, e12);
    worst = std::max(worst, (twice.matrix() - once.matrix()).cwiseAbs().maxCoeff());
    for (double nu : symplectic_eigenvalues(once)) min_nu = std::min(min_nu, nu);
  }
  const bool ok = worst < 1e-12 && min_nu >= kVacuumVariance - 1e-9;
  return {"loss channel composition", ok, "max deviation = " + sci(worst) + ", min nu = " + sci(min_nu)};
}

CheckResult loss_monotone(const SelfcheckOptions& o, std::mt19937_64& rng) {
  // along the lossy coupler run and on random states with random transmittivities
  CouplerDevice d = coupler_preset(Figure::kFig5);
  d.grid.step = o.step;
  const CouplerReport r = run_coupler(d);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& s : r.samples) {
    for (const auto& p : all_bipartitions(4)) {
      worst = std::max(worst, log_negativity(s.v_lossy, p) - log_negativity(s.v, p));
    }
  }
  std::uniform_real_distribution<double> ud(0.05, 1.0);
  for (int k = 0; k < o.random_trials; ++k) {
    const CovarianceMatrix v = random_pure_state(4, rng);
    std::vector<double> etas{ud(rng), ud(rng), ud(rng), ud(rng)};
    const CovarianceMatrix l = apply_loss(v, etas);
    for (const auto& p : all_bipartitions(4)) worst = std::max(worst, log_negativity(l, p) - log_negativity(v, p));
  }
  return {"negativity monotone under loss", worst <= 1e-12, "max E_lossy - E = " + sci(worst)};
}

CheckResult hierarchy(const SelfcheckOptions& o) {
  const Propagation p = propagate(initial_state(0.0), kKappa, IntegrationGrid{3.5, o.step, 10});
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& s : p.samples) worst = std::min(worst, hierarchy_margin(s.covariance));
  return {"negativity hierarchy under tracing", worst >= 0.0, "min E(2|2) - E(1|1) = " + sci(worst)};
}

CheckResult vlf_vacuum() {
  const VlfRow row = vlf_values(vacuum_cm(4), default_vlf_set());
  double worst = 0.0;
  for (double v : row.values) worst = std::max(worst, std::abs(v - kVlfThreshold));
  return {"VLF equals 2 on vacuum", worst < 1e-12, "max |VLF - 2| = " + sci(worst)};
}

CheckResult rk4_order() {
  // Coarse enough that truncation error dominates round-off.
  const RichardsonReport r = richardson_check(initial_state(0.0), kKappa, 3.5, 0.05);
  const bool ok = r.observed_order > 3.6 && r.observed_order < 4.4;
  return {"RK4 convergence order", ok, "observed order = " + format_double(std::round(r.observed_order * 1000) / 1000)};
}

CheckResult rk4_accuracy(const SelfcheckOptions& o) {
  const RichardsonReport r = richardson_check(initial_state(0.0), kKappa, 3.5, o.step);
  return {"RK4 step accuracy", !r.degraded,
          (r.degraded ? "DEGRADED: " : "") + std::string("estimated error ") + sci(r.error_estimate) + " at step " +
              format_double(o.step)};
}

}  // namespace

CovarianceMatrix random_pure_state(int n_modes, std::mt19937_64& rng, double scale) {
  const Eigen::MatrixXd s = random_symplectic(n_modes, rng, scale);
  return transform(vacuum_cm(n_modes), s);
}

CovarianceMatrix random_mixed_state(int n_modes, std::mt19937_64& rng, double max_excess) {
  std::uniform_real_distribution<double> ud(0.0, max_excess);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int m = 0; m < n_modes; ++m) d(2 * m, 2 * m) = d(2 * m + 1, 2 * m + 1) = kVacuumVariance + ud(rng);
  return transform(CovarianceMatrix(d), random_symplectic(n_modes, rng, 0.4));
}

std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& opts) {
  if (!(opts.step > 0.0)) throw InvalidArgument("selfcheck step must be positive");
  std::mt19937_64 rng(opts.seed);
  std::vector<CheckResult> out;
  auto guarded = [&](auto&& fn) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({"(check aborted)", false, e.what()});
    }
  };
  guarded([&] { return power_conservation(opts); });
  guarded([&] { return symplecticity(opts); });
  guarded([&] { return global_purity(opts); });
  guarded([&] { return shg_oracle(opts); });
  guarded([&] { return pt_involution(opts, rng); });
  guarded([&] { return swap_symmetry(opts, rng); });
  guarded([&] { return channel_composition(opts, rng); });
  guarded([&] { return loss_monotone(opts, rng); });
  guarded([&] { return hierarchy(opts); });
  guarded([] { return vlf_vacuum(); });
  guarded([] { return rk4_order(); });
  guarded([&] { return rk4_accuracy(opts); });
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::ranges::all_of(results, [](const CheckResult& r) { return r.passed; });
}

std::string format_results(const std::vector<CheckResult>& results) {
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  std::ostringstream os;
  for (const auto& r : results) {
    os << (r.passed ? "PASS  " : "FAIL  ") << r.name << std::string(width - r.name.size() + 2, ' ') << r.detail
       << '\n';
  }
  os << (all_passed(results) ? "all checks passed" : "SOME CHECKS FAILED") << '\n';
  return os.str();
}

}  // namespace nlc
