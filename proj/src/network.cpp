#include "netmimo/network.hpp"

#include <cmath>
#include <stdexcept>

#include "netmimo/rng.hpp"

namespace netmimo {

NetworkConfig NetworkConfig::make(int num_bs, int antennas_per_bs, int num_users,
                                  int antennas_per_user, double bs_power) {
  if (num_bs < 1 || antennas_per_bs < 1 || num_users < 1 || antennas_per_user < 1) {
    throw std::invalid_argument("network dimensions must be at least 1");
  }
  if (!(bs_power > 0.0) || !std::isfinite(bs_power)) {
    throw std::invalid_argument("bs_power must be positive and finite");
  }
  if (num_bs * antennas_per_bs != num_users * antennas_per_user) {
    throw std::invalid_argument(
        "total transmit antennas K_t*N_t must equal total receive antennas K_r*N_r");
  }
  return NetworkConfig{num_bs, antennas_per_bs, num_users, antennas_per_user, bs_power};
}

AntennaSpan bs_antenna_span(const NetworkConfig& cfg, int bs_index) {
  if (bs_index < 0 || bs_index >= cfg.num_bs) {
    throw std::out_of_range("bs_index out of range");
  }
  return AntennaSpan{bs_index * cfg.antennas_per_bs, cfg.antennas_per_bs};
}

ComplexMatrix bs_selector(const NetworkConfig& cfg, int bs_index) {
  const AntennaSpan span = bs_antenna_span(cfg, bs_index);
  const int m = cfg.total_antennas();
  ComplexMatrix b = ComplexMatrix::Zero(m, m);
  for (int i = 0; i < span.count; ++i) {
    b(span.first + i, span.first + i) = 1.0;
  }
  return b;
}

namespace {

bool full_row_rank(const ComplexMatrix& h) {
  const SvdResult dec = svd(h);
  const double sigma_max = dec.sigma(0);
  const double sigma_min = dec.sigma(dec.sigma.size() - 1);
  return sigma_max > 0.0 && sigma_min > 1e-9 * sigma_max;
}

}  // namespace

ChannelSet sample_channels(const NetworkConfig& cfg, std::uint64_t seed) {
  const int m = cfg.total_antennas();
  const double scale = std::sqrt(0.5);
  ChannelSet out;
  out.seed = seed;
  out.channels.reserve(cfg.num_users);
  for (int k = 0; k < cfg.num_users; ++k) {
    for (std::uint64_t attempt = 0;; ++attempt) {
      rng::SplitMix64 gen(rng::derive_stream(seed, static_cast<std::uint64_t>(k), attempt));
      ComplexMatrix h(cfg.antennas_per_user, m);
      for (int r = 0; r < h.rows(); ++r) {
        for (int c = 0; c < h.cols(); ++c) {
          const double re = gen.next_gaussian();
          const double im = gen.next_gaussian();
          h(r, c) = std::complex<double>(scale * re, scale * im);
        }
      }
      if (full_row_rank(h)) {
        out.channels.push_back(std::move(h));
        break;
      }
    }
  }
  return out;
}

ComplexMatrix stack_complement(const ChannelSet& ch, int user) {
  const int num_users = ch.num_users();
  if (user < 0 || user >= num_users) {
    throw std::out_of_range("user index out of range");
  }
  const auto rows_per_user = ch.channels[0].rows();
  const auto cols = ch.channels[0].cols();
  ComplexMatrix g(rows_per_user * (num_users - 1), cols);
  Eigen::Index row = 0;
  for (int i = 0; i < num_users; ++i) {
    if (i == user) continue;
    g.middleRows(row, rows_per_user) = ch.channels[i];
    row += rows_per_user;
  }
  return g;
}

}  // namespace netmimo
