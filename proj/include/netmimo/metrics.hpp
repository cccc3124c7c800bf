#pragma once

#include <vector>

#include "netmimo/network.hpp"

namespace netmimo {

/// Per-user transmit covariance matrices, each M x M Hermitian PSD with
/// numerical rank at most N_r.
struct CovarianceSet {
  std::vector<ComplexMatrix> s;

  int num_users() const { return static_cast<int>(s.size()); }
  static CovarianceSet zeros(int num_users, int dim);
};

constexpr double kLn2 = 0.6931471805599453;

inline double nats_to_bits(double nats) { return nats / kLn2; }

/// Achievable rate of one user in nats per channel use, interference treated
/// as noise:
///   ln det(I + sum_i H_k S_i H_k^H) - ln det(I + sum_{i != k} H_k S_i H_k^H).
/// Throws std::invalid_argument if the interference Gram matrix is not PSD
/// within tolerance.
double user_rate(const ChannelSet& ch, const CovarianceSet& s, int user);

double sum_rate_nats(const ChannelSet& ch, const CovarianceSet& s);
double sum_rate_bits(const ChannelSet& ch, const CovarianceSet& s);

/// sum_k Tr(B_j S_k) restricted to base station bs_index's antenna block.
double per_bs_power(const NetworkConfig& cfg, const CovarianceSet& s, int bs_index);
double max_bs_power(const NetworkConfig& cfg, const CovarianceSet& s);

/// Residual inter-user interference, max over (k, i != k) of
/// ||H_i S_k H_i^H||_F / (1 + ||S_k||_F). Zero-interference precoders score
/// ~1e-16; a single-user set scores 0 by convention.
double leakage_norm(const ChannelSet& ch, const CovarianceSet& s);

/// Number of eigenvalues above rel_tol times the largest.
int effective_rank(const ComplexMatrix& s, double rel_tol = 1e-8);

/// Effective SNR gain of scaling covariances by 1/rho: 10 log10(1/rho) dB.
/// Requires 0 < rho <= 1 + 1e-9.
double snr_boost_db(double rho);

/// Factor W (M x max_rank) with W W^H = S; columns beyond the numerical rank
/// are zero. Throws std::invalid_argument when the numerical rank exceeds
/// max_rank.
ComplexMatrix covariance_to_precoder(const ComplexMatrix& s, int max_rank);

/// Re-checks the CovarianceSet invariants (PSD within -1e-9 relative, rank at
/// most N_r at 1e-8). Throws std::invalid_argument on violation.
void validate_covariances(const NetworkConfig& cfg, const CovarianceSet& s);

}  // namespace netmimo
