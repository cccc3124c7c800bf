#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <stdexcept>

namespace netmimo {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Singular value decomposition A = u * diag(sigma) * v.adjoint().
/// u and v are full unitary factors; sigma holds the min(rows, cols)
/// singular values in descending order.
struct SvdResult {
  ComplexMatrix u;
  RealVector sigma;
  ComplexMatrix v;
};

/// Hermitian eigendecomposition A = vectors * diag(values) * vectors.adjoint(),
/// eigenvalues in descending order.
struct HermEigResult {
  RealVector values;
  ComplexMatrix vectors;
};

/// Smallest eigenvalue and its unit eigenvector, reported when a matrix that
/// must be positive definite is not.
struct PdViolation {
  double eigenvalue = 0.0;
  ComplexVector eigenvector;
};

class NotPositiveDefiniteError : public std::runtime_error {
 public:
  explicit NotPositiveDefiniteError(PdViolation violation, int index = -1);

  const PdViolation& violation() const { return violation_; }
  /// Index of the offending matrix in a per-user family, or -1.
  int index() const { return index_; }

 private:
  PdViolation violation_;
  int index_;
};

/// Positive-definiteness threshold: 1e-10 times the largest eigenvalue
/// magnitude, floored at 1. Separates genuine sign changes from roundoff.
double pd_threshold(double max_abs_eigenvalue);

bool all_finite(const ComplexMatrix& a);

/// Throws std::invalid_argument if max |a - a^H| exceeds rel_tol * max|a|.
void require_hermitian(const ComplexMatrix& a, double rel_tol = 1e-12);

/// (a + a^H) / 2.
ComplexMatrix hermitize(const ComplexMatrix& a);

SvdResult svd(const ComplexMatrix& a);

/// Orthonormal basis of the null space {x : a x = 0}. Null directions are the
/// right singular vectors whose singular value is at most tol * sigma_max.
/// A full-rank input yields a zero-column result; a zero-row input yields the
/// identity basis.
ComplexMatrix null_space_basis(const ComplexMatrix& a, double tol = 1e-9);

HermEigResult herm_eig(const ComplexMatrix& a);

/// Returns the violation if the smallest eigenvalue is below
/// pd_threshold(largest magnitude), otherwise nullopt. Input must be Hermitian.
std::optional<PdViolation> pd_violation(const ComplexMatrix& a);

/// Hermitian b with b * a * b = I. Throws NotPositiveDefiniteError when an
/// eigenvalue falls below the positive-definiteness threshold.
ComplexMatrix psd_inv_sqrt(const ComplexMatrix& a);

/// Natural-log determinant of a Hermitian positive definite matrix (callers
/// pass I + X with X PSD). Throws std::invalid_argument when an eigenvalue is
/// not strictly positive.
double log_det_psd(const ComplexMatrix& a);

}  // namespace netmimo
