#include "netmimo/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace netmimo {

NotPositiveDefiniteError::NotPositiveDefiniteError(PdViolation violation, int index)
    : std::runtime_error("matrix is not positive definite (min eigenvalue " +
                         std::to_string(violation.eigenvalue) + ")"),
      violation_(std::move(violation)),
      index_(index) {}

double pd_threshold(double max_abs_eigenvalue) {
  return 1e-10 * std::max(1.0, max_abs_eigenvalue);
}

bool all_finite(const ComplexMatrix& a) {
  return a.array().real().isFinite().all() && a.array().imag().isFinite().all();
}

void require_hermitian(const ComplexMatrix& a, double rel_tol) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("matrix is not square");
  }
  const double scale = a.cwiseAbs().maxCoeff();
  const double dev = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (dev > rel_tol * std::max(scale, 1e-300)) {
    throw std::invalid_argument("matrix is not Hermitian within tolerance");
  }
}

ComplexMatrix hermitize(const ComplexMatrix& a) { return 0.5 * (a + a.adjoint()); }

SvdResult svd(const ComplexMatrix& a) {
  if (!all_finite(a)) {
    throw std::invalid_argument("svd: input has non-finite entries");
  }
  Eigen::JacobiSVD<ComplexMatrix> dec(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return SvdResult{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

ComplexMatrix null_space_basis(const ComplexMatrix& a, double tol) {
  if (tol <= 0.0) {
    throw std::invalid_argument("null_space_basis: tol must be positive");
  }
  const auto cols = a.cols();
  if (a.rows() == 0) {
    return ComplexMatrix::Identity(cols, cols);
  }
  const SvdResult dec = svd(a);
  const double sigma_max = dec.sigma.size() > 0 ? dec.sigma(0) : 0.0;
  if (sigma_max <= 0.0) {
    return dec.v; // zero matrix: everything is null
  }
  Eigen::Index rank = 0;
  while (rank < dec.sigma.size() && dec.sigma(rank) > tol * sigma_max) {
    ++rank;
  }
  return dec.v.rightCols(cols - rank);
}

HermEigResult herm_eig(const ComplexMatrix& a) {
  if (!all_finite(a)) {
    throw std::invalid_argument("herm_eig: input has non-finite entries");
  }
  require_hermitian(a);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> dec(a);
  if (dec.info() != Eigen::Success) {
    throw std::runtime_error("herm_eig: eigendecomposition failed");
  }
  // Eigen returns ascending order; the contract is descending.
  const auto n = a.rows();
  HermEigResult out;
  out.values = dec.eigenvalues().reverse();
  out.vectors = ComplexMatrix(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.vectors.col(i) = dec.eigenvectors().col(n - 1 - i);
  }
  return out;
}

std::optional<PdViolation> pd_violation(const ComplexMatrix& a) {
  const HermEigResult dec = herm_eig(a);
  const auto n = dec.values.size();
  const double max_abs = std::max(std::abs(dec.values(0)), std::abs(dec.values(n - 1)));
  const double min_eig = dec.values(n - 1);
  if (min_eig < pd_threshold(max_abs)) {
    return PdViolation{min_eig, dec.vectors.col(n - 1)};
  }
  return std::nullopt;
}

ComplexMatrix psd_inv_sqrt(const ComplexMatrix& a) {
  const HermEigResult dec = herm_eig(a);
  const auto n = dec.values.size();
  const double max_abs = std::max(std::abs(dec.values(0)), std::abs(dec.values(n - 1)));
  const double eps = pd_threshold(max_abs);
  const double min_eig = dec.values(n - 1);
  if (min_eig < eps) {
    throw NotPositiveDefiniteError(PdViolation{min_eig, dec.vectors.col(n - 1)});
  }
  const RealVector inv_sqrt = dec.values.array().sqrt().inverse();
  return hermitize(dec.vectors * inv_sqrt.asDiagonal() * dec.vectors.adjoint());
}

double log_det_psd(const ComplexMatrix& a) {
  require_hermitian(a, 1e-10);
  Eigen::LLT<ComplexMatrix> llt(a);
  if (llt.info() == Eigen::Success) {
    double acc = 0.0;
    const ComplexMatrix l = llt.matrixL();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
      acc += std::log(l(i, i).real());
    }
    return 2.0 * acc;
  }
  // Cholesky refused: decide via eigenvalues whether the input is invalid or
  // merely near-singular.
  const HermEigResult dec = herm_eig(hermitize(a));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < dec.values.size(); ++i) {
    if (dec.values(i) <= 0.0) {
      throw std::invalid_argument("log_det_psd: matrix has a non-positive eigenvalue");
    }
    acc += std::log(dec.values(i));
  }
  return acc;
}

}  // namespace netmimo
