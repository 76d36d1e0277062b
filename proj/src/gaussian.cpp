#include "nlc/gaussian.hpp"

#include "nlc/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace nlc {

namespace {

void check_mode_index(int m, int n_modes) {
  if (m < 0 || m >= n_modes) {
    throw InvalidArgument("mode index " + std::to_string(m) + " out of range for " +
                          std::to_string(n_modes) + "-mode state");
  }
}

void check_bipartition(const Bipartition& p, int n_modes, bool require_cover) {
  if (p.party_a.empty() || p.party_b.empty()) {
    throw InvalidArgument("bipartition parties must be non-empty");
  }
  std::vector<int> seen(static_cast<std::size_t>(n_modes), 0);
  for (const auto* party : {&p.party_a, &p.party_b}) {
    for (int m : *party) {
      check_mode_index(m, n_modes);
      if (seen[static_cast<std::size_t>(m)]++ != 0) {
        throw InvalidArgument("bipartition parties overlap at mode " + std::to_string(m));
      }
    }
  }
  if (require_cover && std::ranges::find(seen, 0) != seen.end()) {
    throw InvalidArgument("bipartition does not cover every mode of the state");
  }
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd entries) : m_(std::move(entries)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols() || m_.rows() % 2 != 0) {
    throw InvalidArgument("covariance matrix must be square with even, non-zero dimension");
  }
  if (!m_.allFinite()) {
    throw InvalidArgument("covariance matrix has non-finite entries");
  }
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("covariance matrix is not symmetric");
  }
}

Eigen::MatrixXd symplectic_form(int n_modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int j = 0; j < n_modes; ++j) {
    omega(2 * j, 2 * j + 1) = 1.0;
    omega(2 * j + 1, 2 * j) = -1.0;
  }
  return omega;
}

CovarianceMatrix vacuum_cm(int n_modes) {
  if (n_modes < 1) throw InvalidArgument("vacuum_cm needs at least one mode");
  return CovarianceMatrix(kVacuumVariance * Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
}

CovarianceMatrix tmsv_cm(double r) {
  if (!std::isfinite(r)) throw InvalidArgument("squeezing parameter must be finite");
  const double c = std::cosh(2.0 * r) / 2.0;
  const double s = std::sinh(2.0 * r) / 2.0;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  m.diagonal().setConstant(c);
  m(0, 2) = m(2, 0) = s;
  m(1, 3) = m(3, 1) = -s;
  return CovarianceMatrix(std::move(m));
}

CovarianceMatrix direct_sum(const CovarianceMatrix& a, const CovarianceMatrix& b) {
  const auto na = a.matrix().rows();
  const auto nb = b.matrix().rows();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(na + nb, na + nb);
  m.topLeftCorner(na, na) = a.matrix();
  m.bottomRightCorner(nb, nb) = b.matrix();
  return CovarianceMatrix(std::move(m));
}

CovarianceMatrix transform(const CovarianceMatrix& v, const Eigen::MatrixXd& s) {
  if (s.rows() != v.matrix().rows() || s.cols() != v.matrix().cols()) {
    throw InvalidArgument("transform: dimension mismatch");
  }
  Eigen::MatrixXd out = s * v.matrix() * s.transpose();
  return CovarianceMatrix(0.5 * (out + out.transpose()));
}

std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& v) {
  const int n = v.n_modes();
  // Eigenvalues of Omega V come in pairs +-i nu; those of i Omega V are +-nu.
  Eigen::EigenSolver<Eigen::MatrixXd> solver(symplectic_form(n) * v.matrix(), false);
  if (solver.info() != Eigen::Success) {
    throw InvalidState("symplectic spectrum: eigen-solver did not converge");
  }
  std::vector<double> moduli;
  moduli.reserve(static_cast<std::size_t>(2 * n));
  for (const auto& ev : solver.eigenvalues()) moduli.push_back(std::abs(ev));
  std::ranges::sort(moduli);
  std::vector<double> nu(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    nu[static_cast<std::size_t>(k)] =
        0.5 * (moduli[static_cast<std::size_t>(2 * k)] + moduli[static_cast<std::size_t>(2 * k + 1)]);
  }
  return nu;
}

bool is_physical(const CovarianceMatrix& v, double tol) {
  return symplectic_eigenvalues(v).front() >= kVacuumVariance - tol;
}

void require_physical(const CovarianceMatrix& v, double tol) {
  const double nu_min = symplectic_eigenvalues(v).front();
  if (nu_min < kVacuumVariance - tol) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "minimal symplectic eigenvalue %.12g below 1/2", nu_min);
    throw InvalidState(buf);
  }
}

CovarianceMatrix partial_transpose(const CovarianceMatrix& v, const Bipartition& p) {
  check_bipartition(p, v.n_modes(), false);
  Eigen::MatrixXd m = v.matrix();
  for (int mode : p.party_b) {
    m.row(2 * mode + 1) *= -1.0;
    m.col(2 * mode + 1) *= -1.0;
  }
  return CovarianceMatrix(std::move(m));
}

CovarianceMatrix reduce(const CovarianceMatrix& v, std::span<const int> modes) {
  if (modes.empty()) throw InvalidArgument("reduce: empty mode set");
  const int n = v.n_modes();
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  for (int m : modes) {
    check_mode_index(m, n);
    if (seen[static_cast<std::size_t>(m)]++ != 0) {
      throw InvalidArgument("reduce: repeated mode " + std::to_string(m));
    }
  }
  const auto k = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXd out(2 * k, 2 * k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      out.block<2, 2>(2 * i, 2 * j) = v.block(modes[static_cast<std::size_t>(i)],
                                              modes[static_cast<std::size_t>(j)]);
    }
  }
  return CovarianceMatrix(std::move(out));
}

CovarianceMatrix reduce(const CovarianceMatrix& v, std::initializer_list<int> modes) {
  return reduce(v, std::span<const int>(modes.begin(), modes.size()));
}

double log_negativity(const CovarianceMatrix& v, const Bipartition& p) {
  check_bipartition(p, v.n_modes(), true);
  require_physical(v);
  double en = 0.0;
  for (double nu : symplectic_eigenvalues(partial_transpose(v, p))) {
    en += std::max(0.0, -std::log2(2.0 * nu));
  }
  return en;
}

double purity(const CovarianceMatrix& v) {
  const double det = v.matrix().determinant();
  if (!(det > 0.0)) throw InvalidState("purity: covariance matrix has non-positive determinant");
  return 1.0 / (std::pow(2.0, v.n_modes()) * std::sqrt(det));
}

double fidelity_to_tmsv(const CovarianceMatrix& v, double r) {
  if (v.n_modes() != 2) throw InvalidArgument("fidelity_to_tmsv requires a two-mode state");
  const double det = (v.matrix() + tmsv_cm(r).matrix()).determinant();
  if (!(det > 0.0)) throw InvalidState("fidelity_to_tmsv: non-positive determinant");
  return 1.0 / std::sqrt(det);
}

std::vector<std::string> quadrature_labels(std::span<const std::string> mode_names) {
  std::vector<std::string> labels;
  labels.reserve(2 * mode_names.size());
  for (const auto& name : mode_names) {
    labels.push_back("X_" + name);
    labels.push_back("Y_" + name);
  }
  return labels;
}

void write_cm_csv(std::ostream& os, const CovarianceMatrix& v,
                  std::span<const std::string> mode_names) {
  if (static_cast<int>(mode_names.size()) != v.n_modes()) {
    throw InvalidArgument("write_cm_csv: need one name per mode");
  }
  const auto labels = quadrature_labels(mode_names);
  for (std::size_t i = 0; i < labels.size(); ++i) os << (i ? "," : "") << labels[i];
  os << '\n';
  char buf[32];
  for (Eigen::Index r = 0; r < v.matrix().rows(); ++r) {
    for (Eigen::Index c = 0; c < v.matrix().cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", v(r, c));
      os << (c ? "," : "") << buf;
    }
    os << '\n';
  }
}

CovarianceMatrix read_cm_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("read_cm_csv: empty input");
  const auto n_cols = std::ranges::count(line, ',') + 1;
  Eigen::MatrixXd m(n_cols, n_cols);
  for (Eigen::Index r = 0; r < n_cols; ++r) {
    if (!std::getline(is, line)) throw InvalidArgument("read_cm_csv: too few rows");
    std::istringstream row(line);
    std::string cell;
    for (Eigen::Index c = 0; c < n_cols; ++c) {
      if (!std::getline(row, cell, ',')) throw InvalidArgument("read_cm_csv: short row");
      m(r, c) = std::stod(cell);
    }
  }
  return CovarianceMatrix(std::move(m));
}

}  // namespace nlc
