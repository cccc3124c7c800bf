#pragma once

#include <vector>

#include "netmimo/bd.hpp"

namespace netmimo {

/// Linearization of the interference side of each rate constraint around the
/// zero-interference solution: gradient[k] = H_k^H [I - (I + H_k S_k H_k^H)^{-1}] H_k
/// (Hermitian PSD), together with the per-user rate targets.
struct RateLinearization {
  std::vector<ComplexMatrix> gradient; // F_k, M x M
  std::vector<double> rate_targets;    // nats

  int num_users() const { return static_cast<int>(gradient.size()); }
};

/// Dual variables of the reduced power-minimization dual: one rate multiplier
/// per user and one power multiplier per base station, the last eliminated via
/// sum_j mu_j = 1/P.
struct DualPoint {
  RealVector lambda;  // K_r, >= 0
  RealVector mu_head; // K_t - 1, >= 0 with sum <= 1/P
  double power_budget = 1.0;

  double mu_last() const { return 1.0 / power_budget - mu_head.sum(); }
  RealVector full_mu() const;
  RealVector stacked() const; // [lambda; mu_head]
  static DualPoint from_stacked(const RealVector& x, int num_users, int num_bs,
                                double power_budget);
};

RateLinearization linearize_rates(const ChannelSet& ch, const BDSolution& bd);

/// Per-user quadratic cost of the dual subproblem,
///   C_k = sum_j mu_j B_j + sum_{i != k} lambda_i F_i,
/// plus its positive-definiteness violation when the smallest eigenvalue
/// falls below the threshold (a cut signal, not an error).
struct UserCost {
  ComplexMatrix matrix;
  std::optional<PdViolation> violation;
};
UserCost assemble_user_cost(const NetworkConfig& cfg, const RateLinearization& lin,
                            const DualPoint& d, int user);

/// Water-filling allocation d_s = (level - 1/sigma_s^2)^+ per mode. The level
/// is the rate multiplier itself; there is no sum constraint. Modes with
/// sigma below 1e-12 are treated as closed (allocation 0).
RealVector water_fill(double level, const RealVector& singular_values);

/// Closed-form maximizer of
///   lambda_k ln det(I + H_k S H_k^H) - Tr(C_k S)  over S >= 0:
/// S_k = C_k^{-1/2} Vbar D Vbar^H C_k^{-1/2} with H_k C_k^{-1/2} = Ubar
/// diag(sigma) Vbar^H reduced and D from water_fill(lambda_k, sigma). Rank is
/// bounded by N_r by construction. Throws NotPositiveDefiniteError when C_k
/// is not positive definite.
ComplexMatrix primal_update(const NetworkConfig& cfg, const ChannelSet& ch,
                            const RateLinearization& lin, const DualPoint& d, int user);

/// Dual objective value, subgradients and the primal maximizers at one dual
/// point. Requires every C_k positive definite.
struct DualEval {
  double value = 0.0;
  RealVector subgrad_lambda; // K_r
  RealVector subgrad_mu;     // K_t - 1
  CovarianceSet primal;
};
DualEval dual_value_and_subgradients(const NetworkConfig& cfg, const ChannelSet& ch,
                                     const RateLinearization& lin, const DualPoint& d);

struct EnhanceIterate {
  int iteration = 0;
  CutKind kind = CutKind::kObjective;
  double rho = 0.0;             // max per-BS power ratio of the iterate's primal
  double scaled_sum_rate = 0.0; // nats, under covariances / rho
};

/// Output of the improved-precoder pipeline: the power-minimized covariances,
/// the power factor they achieve, and the rescaled covariances that spend the
/// full budget (an effective SNR gain of 10 log10(1/rho) dB).
struct EnhanceSolution {
  CovarianceSet minimized;    // S**
  double rho = 1.0;           // max_j per-BS power of S** divided by P
  CovarianceSet proposed;     // S** / rho
  std::vector<double> rates;  // per-user rates of proposed, nats
  double sum_rate_nats = 0.0; // of proposed
  DualPoint dual;
  double dual_value = 0.0;
  double best_scaled_sum_rate = 0.0; // best over the iterate trace
  int iterations = 0;
  std::vector<EnhanceIterate> trace;
};

/// Primal-dual solve of the rate-constrained power minimization (rate side
/// linearized around the zero-interference solution): ellipsoid over the
/// K_r + K_t - 1 reduced duals, closed-form primal updates, feasibility cuts
/// for sign/simplex violations and for positive-definiteness violations of
/// any C_k (cut along the negative min-eigenvalue gradient). Stops when
/// sqrt(s^T E s) <= 1e-6 or at 200 n^2 iterations (ConvergenceError).
EnhanceSolution solve_enhanced(const NetworkConfig& cfg, const ChannelSet& ch,
                               const BDSolution& bd);

/// Covariance rescaling by the converged power factor. Requires 0 < rho <= 1.
CovarianceSet rescale_covariances(const CovarianceSet& s, double rho);

/// SINR targets achieved by the zero-forcing (single-antenna) solution:
/// gamma_k = exp(R_k) - 1. Requires N_r == 1.
std::vector<double> zf_sinr_targets(const NetworkConfig& cfg, const BDSolution& bd);

struct MisoPowerMinSolution {
  std::vector<ComplexVector> precoders; // w_k, M x 1
  double rho = 1.0;
  int iterations = 0;
};

/// Exact single-antenna power minimization under per-user SINR targets and
/// per-BS power caps. Each SINR constraint is the cone form
///   sqrt(1 + 1/gamma_k) Re(h_k w_k) >= ||[h_k w_1 .. h_k w_Kr, 1]||_2,
/// with Im(h_k w_k) = 0 eliminated by an orthonormal reparameterization per
/// user; the reduced convex program is solved with the ellipsoid method,
/// minimizing the max per-BS power ratio under SINR feasibility cuts.
MisoPowerMinSolution solve_miso_power_min(const NetworkConfig& cfg, const ChannelSet& ch,
                                          const std::vector<double>& sinr_targets);

}  // namespace netmimo
