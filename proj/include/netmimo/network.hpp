#pragma once

#include <cstdint>
#include <vector>

#include "netmimo/linalg.hpp"

namespace netmimo {

/// Downlink cooperative network dimensions. All base stations share one joint
/// precoder; noise power is normalized to 1, so the system SNR equals the
/// per-BS power budget.
struct NetworkConfig {
  int num_bs = 1;            // K_t
  int antennas_per_bs = 1;   // N_t
  int num_users = 1;         // K_r
  int antennas_per_user = 1; // N_r
  double bs_power = 1.0;     // P, linear units

  int total_antennas() const { return num_bs * antennas_per_bs; }

  /// Validating constructor. Requires all counts >= 1, bs_power > 0 and the
  /// square-system condition K_t*N_t == K_r*N_r.
  static NetworkConfig make(int num_bs, int antennas_per_bs, int num_users,
                            int antennas_per_user, double bs_power);
};

/// One channel realization: num_users matrices of shape N_r x M, each full
/// row rank. A pure function of (config, seed).
struct ChannelSet {
  std::vector<ComplexMatrix> channels;
  std::uint64_t seed = 0;

  int num_users() const { return static_cast<int>(channels.size()); }
};

/// M x M diagonal 0/1 matrix selecting base station bs_index's antennas
/// (0-based). The num_bs selectors partition the identity.
ComplexMatrix bs_selector(const NetworkConfig& cfg, int bs_index);

/// Half-open antenna index range [first, first + count) owned by a BS.
struct AntennaSpan {
  int first = 0;
  int count = 0;
};
AntennaSpan bs_antenna_span(const NetworkConfig& cfg, int bs_index);

/// i.i.d. circularly symmetric complex Gaussian channels with unit entry
/// variance (real and imaginary parts each N(0, 1/2)). Deterministic in
/// (cfg, seed); per-user substreams are derived by hashing (seed, user,
/// attempt), where attempt increments on the probability-zero rank-deficient
/// redraw.
ChannelSet sample_channels(const NetworkConfig& cfg, std::uint64_t seed);

/// All users' channels stacked in index order with user k removed:
/// shape N_r(K_r - 1) x M.
ComplexMatrix stack_complement(const ChannelSet& ch, int user);

}  // namespace netmimo
