#pragma once

// Gaussian-state linear algebra in quadrature units where the vacuum variance
// is 1/2. Quadratures are stored mode-major: (X_1, Y_1, X_2, Y_2, ...).

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace nlc {

inline constexpr double kVacuumVariance = 0.5;

/// Minimal symplectic eigenvalue accepted as physical is 1/2 - kValidityTolerance.
inline constexpr double kValidityTolerance = 1e-7;

/// Real symmetric 2N x 2N second-moment matrix. Construction checks shape,
/// finiteness and symmetry (1e-12 relative); physicality is checked
/// separately by is_physical()/require_physical() because intermediate
/// objects such as partial transposes are legitimately unphysical.
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(Eigen::MatrixXd entries);

  int n_modes() const { return static_cast<int>(m_.rows() / 2); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

  /// 2x2 block coupling mode j (rows) with mode k (columns).
  Eigen::Matrix2d block(int j, int k) const { return m_.block<2, 2>(2 * j, 2 * k); }

 private:
  Eigen::MatrixXd m_;
};

/// Block-diagonal [[0,1],[-1,0]] form on n modes.
Eigen::MatrixXd symplectic_form(int n_modes);

/// Two disjoint groups of mode indices (0-based).
struct Bipartition {
  std::vector<int> party_a;
  std::vector<int> party_b;

  Bipartition swapped() const { return {party_b, party_a}; }
};

CovarianceMatrix vacuum_cm(int n_modes);

/// Two-mode squeezed vacuum: diagonal blocks cosh(2r)/2 I, off-diagonal
/// blocks sinh(2r)/2 diag(1, -1).
CovarianceMatrix tmsv_cm(double r);

/// Block-diagonal combination; modes of `b` follow those of `a`.
CovarianceMatrix direct_sum(const CovarianceMatrix& a, const CovarianceMatrix& b);

/// S V S^T, symmetrized against round-off.
CovarianceMatrix transform(const CovarianceMatrix& v, const Eigen::MatrixXd& s);

/// Moduli of the eigenvalues of i Omega V, paired and sorted ascending
/// (N values for N modes).
std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& v);

bool is_physical(const CovarianceMatrix& v, double tol = kValidityTolerance);

/// Throws InvalidState with the offending eigenvalue when !is_physical.
void require_physical(const CovarianceMatrix& v, double tol = kValidityTolerance);

/// Flips the sign of every Y quadrature of party_b (rows and columns).
CovarianceMatrix partial_transpose(const CovarianceMatrix& v, const Bipartition& p);

/// Gaussian partial trace: keeps the blocks of `modes`, in the given order.
CovarianceMatrix reduce(const CovarianceMatrix& v, std::span<const int> modes);
CovarianceMatrix reduce(const CovarianceMatrix& v, std::initializer_list<int> modes);

/// Logarithmic negativity in bits: sum_k max(0, -log2(2 nu_k)) over the
/// symplectic spectrum of the partial transpose. `p` must cover every mode.
double log_negativity(const CovarianceMatrix& v, const Bipartition& p);

/// 1 / (2^N sqrt(det V)).
double purity(const CovarianceMatrix& v);

/// The approximate formula 1/sqrt(det(V + V_tmsv(r))) for two-mode,
/// zero-mean states. This is not the exact Gaussian fidelity.
double fidelity_to_tmsv(const CovarianceMatrix& v, double r);

/// Quadrature labels "X_<name>", "Y_<name>" in storage order.
std::vector<std::string> quadrature_labels(std::span<const std::string> mode_names);

/// Row-major CSV with a quadrature-label header line.
void write_cm_csv(std::ostream& os, const CovarianceMatrix& v,
                  std::span<const std::string> mode_names);
CovarianceMatrix read_cm_csv(std::istream& is);

}  // namespace nlc
