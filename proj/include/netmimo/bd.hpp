#pragma once

#include <vector>

#include "netmimo/ellipsoid.hpp"
#include "netmimo/metrics.hpp"

namespace netmimo {

/// Raised when a dual ellipsoid search exhausts its budget before the cut-norm
/// stop rule fires.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<EllipsoidTraceEntry> trace);
  const std::vector<EllipsoidTraceEntry>& trace() const { return trace_; }

 private:
  std::vector<EllipsoidTraceEntry> trace_;
};

/// Per-user interference null-space bases: basis[k] is M x N_r with
/// orthonormal columns spanning the null space of the stacked complement
/// channel, and effective[k] = H_k basis[k] is the N_r x N_r channel seen
/// through it.
struct BDNullSpace {
  std::vector<ComplexMatrix> basis;
  std::vector<ComplexMatrix> effective;

  int num_users() const { return static_cast<int>(basis.size()); }
};

/// Sum-rate-optimal zero-interference covariances under per-BS power
/// constraints, plus the per-user rates they achieve (the rate targets of the
/// improved precoder stage).
struct BDSolution {
  std::vector<ComplexMatrix> q;     // N_r x N_r PSD inner covariances
  CovarianceSet covariances;        // S_k = V~_k Q_k V~_k^H
  std::vector<double> rate_targets; // nats
  double sum_rate_nats = 0.0;
  RealVector mu;                    // converged duals, one per BS
  double dual_value = 0.0;
  int iterations = 0;
};

/// Null-space bases for every user. Throws std::runtime_error when a null
/// space does not have dimension exactly N_r (degenerate channels).
BDNullSpace build_null_spaces(const NetworkConfig& cfg, const ChannelSet& ch);

/// Inner maximizers Q_k of the per-user dual subproblem
///   max_{Q >= 0} ln det(I + H~_k Q H~_k^H) - Tr(A_k Q),
/// with A_k = basis_k^H (sum_j mu_j B_j) basis_k. Whitening by A_k^{-1/2}
/// reduces each subproblem to water-filling at unit level. Throws
/// NotPositiveDefiniteError (index = user) when some A_k is not positive
/// definite; the dual loop turns that into a feasibility cut.
std::vector<ComplexMatrix> bd_primal_update(const NetworkConfig& cfg,
                                            const BDNullSpace& ns,
                                            const RealVector& mu);

/// Lagrangian dual solve of the zero-interference sum-rate problem: ellipsoid
/// search over the K_t power multipliers with water-filling primal updates.
/// The converged covariances are rescaled so the loaded base station sits
/// exactly at the power budget.
BDSolution bd_solve(const NetworkConfig& cfg, const ChannelSet& ch);

}  // namespace netmimo
