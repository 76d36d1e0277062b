#include "nlc/quantum.hpp"

#include "nlc/errors.hpp"
#include "nlc/rk4.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

namespace nlc {

namespace {

const Mat8& omega8() {
  static const Mat8 omega = symplectic_form(4);
  return omega;
}

// Classical fields plus one 8x8 matrix (transfer matrix, generator integral or
// covariance) advanced by the same RK4 stages.
struct Joint {
  ClassicalState c;
  Mat8 m;
};

Joint operator+(const Joint& l, const Joint& r) { return {l.c + r.c, l.m + r.m}; }
Joint operator*(double s, const Joint& v) { return {s * v.c, s * v.m}; }

void fill_waveguide(Mat8& d, Mode f, Mode h, Mode other_f, cplx af, cplx ah, double kappa) {
  const double s2 = std::numbers::sqrt2;
  const int xf = quad_x(f), yf = quad_y(f), xh = quad_x(h), yh = quad_y(h);
  // a_h' contributes u_h (sin th_h, cos th_h) = (Im, Re) a_h, and likewise for a_f.
  d(xf, xf) = -ah.imag();
  d(xf, yf) = ah.real();
  d(xf, quad_y(other_f)) = -kappa;
  d(xf, xh) = s2 * af.imag();
  d(xf, yh) = -s2 * af.real();

  d(yf, xf) = ah.real();
  d(yf, yf) = ah.imag();
  d(yf, quad_x(other_f)) = kappa;
  d(yf, xh) = s2 * af.real();
  d(yf, yh) = s2 * af.imag();

  d(xh, xf) = -s2 * af.imag();
  d(xh, yf) = -s2 * af.real();
  d(yh, xf) = s2 * af.real();
  d(yh, yf) = -s2 * af.imag();
}

Mat8 to_transfer(const Mat8& m, Propagator scheme) {
  if (scheme == Propagator::kGeneratorExponential) return m.exp();
  return m;
}

}  // namespace

std::string_view mode_name(Mode m) {
  static constexpr std::array<std::string_view, 4> names{"f_a", "f_b", "h_a", "h_b"};
  return names[static_cast<std::size_t>(index(m))];
}

std::vector<std::string> csv_mode_names() { return {"fa", "fb", "ha", "hb"}; }

Mode mode_from_name(std::string_view name) {
  for (Mode m : kAllModes) {
    std::string_view full = mode_name(m);
    std::string compact{full.substr(0, 1)};
    compact += full.substr(2);
    if (name == full || name == compact) return m;
  }
  throw InvalidArgument("unknown mode name '" + std::string(name) + "'");
}

Mat8 assemble_drift(const ClassicalState& s, double kappa) {
  Mat8 d = Mat8::Zero();
  fill_waveguide(d, Mode::kFa, Mode::kHa, Mode::kFb, s.a_f, s.a_h, kappa);
  fill_waveguide(d, Mode::kFb, Mode::kHb, Mode::kFa, s.b_f, s.b_h, kappa);
  return d;
}

double hamiltonian_defect(const Mat8& drift) {
  return (drift * omega8() + omega8() * drift.transpose()).cwiseAbs().maxCoeff();
}

double symplecticity_defect(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols() || s.rows() % 2 != 0) {
    throw InvalidArgument("symplecticity_defect: matrix must be square with even size");
  }
  const Eigen::MatrixXd omega = symplectic_form(static_cast<int>(s.rows() / 2));
  return (s * omega * s.transpose() - omega).cwiseAbs().maxCoeff();
}

Mat8 waveguide_major_permutation() {
  // canonical (f_a, f_b, h_a, h_b) -> (f_a, h_a, f_b, h_b)
  constexpr std::array<Mode, 4> order{Mode::kFa, Mode::kHa, Mode::kFb, Mode::kHb};
  Mat8 p = Mat8::Zero();
  for (int k = 0; k < 4; ++k) {
    p(2 * k, quad_x(order[static_cast<std::size_t>(k)])) = 1.0;
    p(2 * k + 1, quad_y(order[static_cast<std::size_t>(k)])) = 1.0;
  }
  return p;
}

std::string_view to_string(Propagator p) {
  return p == Propagator::kGeneratorExponential ? "generator_exponential" : "time_ordered";
}

Propagator propagator_from_string(std::string_view s) {
  if (s == "generator_exponential") return Propagator::kGeneratorExponential;
  if (s == "time_ordered") return Propagator::kTimeOrdered;
  throw InvalidArgument("unknown propagator '" + std::string(s) +
                        "' (expected generator_exponential or time_ordered)");
}

Trajectory Propagation::trajectory() const {
  Trajectory t;
  t.reserve(samples.size());
  for (const auto& s : samples) t.push_back({s.zeta, s.state});
  return t;
}

Propagation propagate(const ClassicalState& s0, double kappa, const IntegrationGrid& grid,
                      Propagator scheme, double defect_limit, const DriftFunction& drift) {
  grid.validate();
  if (!s0.all_finite()) throw InvalidArgument("initial state is not finite");
  const long n = grid.n_steps();
  const double h = grid.effective_step();
  const Mat8 vac = kVacuumVariance * Mat8::Identity();

  auto rhs = [kappa, scheme, &drift](const Joint& y) -> Joint {
    const Mat8 d = drift ? drift(y.c, kappa) : assemble_drift(y.c, kappa);
    if (scheme == Propagator::kTimeOrdered) return {derivative(y.c, kappa), d * y.m};
    return {derivative(y.c, kappa), d};
  };

  Propagation out;
  out.scheme = scheme;
  out.samples.reserve(static_cast<std::size_t>(n / grid.stride + 2));
  out.samples.push_back({0.0, s0, Mat8::Identity(), vacuum_cm(4)});

  Joint y{s0, scheme == Propagator::kTimeOrdered ? Mat8(Mat8::Identity()) : Mat8(Mat8::Zero())};
  for (long i = 1; i <= n; ++i) {
    y = rk4_step(y, h, rhs);
    const double zeta = static_cast<double>(i) * h;
    if (!y.c.all_finite() || !y.m.allFinite()) {
      throw NumericalError("quantum propagation produced non-finite values", zeta);
    }
    if (i % grid.stride != 0 && i != n) continue;
    const Mat8 s = to_transfer(y.m, scheme);
    const double defect = symplecticity_defect(s);
    if (defect > defect_limit) {
      throw NumericalError("transfer matrix lost symplecticity (defect " + std::to_string(defect) +
                               "); reduce the step",
                           zeta);
    }
    out.max_defect = std::max(out.max_defect, defect);
    out.samples.push_back({zeta, y.c, s, transform(CovarianceMatrix(vac), s)});
  }
  return out;
}

Mat8 covariance_rate(const Mat8& drift, const Mat8& v) { return drift * v + v * drift.transpose(); }

std::vector<CovarianceMatrix> propagate_covariance_direct(const ClassicalState& s0, double kappa,
                                                          const IntegrationGrid& grid) {
  grid.validate();
  const long n = grid.n_steps();
  const double h = grid.effective_step();
  auto rhs = [kappa](const Joint& y) -> Joint {
    return {derivative(y.c, kappa), covariance_rate(assemble_drift(y.c, kappa), y.m)};
  };
  std::vector<CovarianceMatrix> out{vacuum_cm(4)};
  Joint y{s0, kVacuumVariance * Mat8::Identity()};
  for (long i = 1; i <= n; ++i) {
    y = rk4_step(y, h, rhs);
    if (!y.m.allFinite()) {
      throw NumericalError("covariance integration produced non-finite values", static_cast<double>(i) * h);
    }
    if (i % grid.stride == 0 || i == n) out.emplace_back(Mat8(0.5 * (y.m + y.m.transpose())));
  }
  return out;
}

}  // namespace nlc
