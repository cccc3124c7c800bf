#include "netmimo/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace netmimo {

CovarianceSet CovarianceSet::zeros(int num_users, int dim) {
  CovarianceSet out;
  out.s.assign(num_users, ComplexMatrix::Zero(dim, dim));
  return out;
}

namespace {

// ln det(I + gram) with gram Hermitian PSD up to roundoff; negative
// eigenvalues beyond tol are rejected, smaller ones clamped to zero.
double log_det_identity_plus(const ComplexMatrix& gram, const char* what) {
  const HermEigResult dec = herm_eig(hermitize(gram));
  const double scale = std::max(1.0, std::abs(dec.values(0)));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < dec.values.size(); ++i) {
    const double v = dec.values(i);
    if (v < -1e-8 * scale) {
      throw std::invalid_argument(std::string(what) + ": matrix is not PSD within tolerance");
    }
    acc += std::log1p(std::max(v, 0.0));
  }
  return acc;
}

}  // namespace

double user_rate(const ChannelSet& ch, const CovarianceSet& s, int user) {
  const int num_users = ch.num_users();
  if (user < 0 || user >= num_users) {
    throw std::out_of_range("user index out of range");
  }
  if (s.num_users() != num_users) {
    throw std::invalid_argument("covariance count does not match channel count");
  }
  const ComplexMatrix& h = ch.channels[user];
  ComplexMatrix total = ComplexMatrix::Zero(h.rows(), h.rows());
  ComplexMatrix interference = ComplexMatrix::Zero(h.rows(), h.rows());
  for (int i = 0; i < num_users; ++i) {
    const ComplexMatrix gram = hermitize(h * s.s[i] * h.adjoint());
    total += gram;
    if (i != user) interference += gram;
  }
  const double rate = log_det_identity_plus(total, "user_rate") -
                      log_det_identity_plus(interference, "user_rate");
  return std::max(rate, 0.0);
}

double sum_rate_nats(const ChannelSet& ch, const CovarianceSet& s) {
  double acc = 0.0;
  for (int k = 0; k < ch.num_users(); ++k) {
    acc += user_rate(ch, s, k);
  }
  return acc;
}

double sum_rate_bits(const ChannelSet& ch, const CovarianceSet& s) {
  return nats_to_bits(sum_rate_nats(ch, s));
}

double per_bs_power(const NetworkConfig& cfg, const CovarianceSet& s, int bs_index) {
  const AntennaSpan span = bs_antenna_span(cfg, bs_index);
  double acc = 0.0;
  for (const ComplexMatrix& sk : s.s) {
    acc += sk.diagonal().segment(span.first, span.count).real().sum();
  }
  return acc;
}

double max_bs_power(const NetworkConfig& cfg, const CovarianceSet& s) {
  double best = 0.0;
  for (int j = 0; j < cfg.num_bs; ++j) {
    best = std::max(best, per_bs_power(cfg, s, j));
  }
  return best;
}

double leakage_norm(const ChannelSet& ch, const CovarianceSet& s) {
  const int num_users = ch.num_users();
  double worst = 0.0;
  for (int k = 0; k < num_users; ++k) {
    const double denom = 1.0 + s.s[k].norm();
    for (int i = 0; i < num_users; ++i) {
      if (i == k) continue;
      const double leak = (ch.channels[i] * s.s[k] * ch.channels[i].adjoint()).norm();
      worst = std::max(worst, leak / denom);
    }
  }
  return worst;
}

int effective_rank(const ComplexMatrix& s, double rel_tol) {
  const HermEigResult dec = herm_eig(s);
  const double largest = dec.values.size() > 0 ? std::abs(dec.values(0)) : 0.0;
  if (largest <= 0.0) return 0;
  int count = 0;
  for (Eigen::Index i = 0; i < dec.values.size(); ++i) {
    if (dec.values(i) > rel_tol * largest) ++count;
  }
  return count;
}

double snr_boost_db(double rho) {
  if (!(rho > 0.0)) {
    throw std::invalid_argument("snr_boost_db: rho must be positive");
  }
  if (rho > 1.0 + 1e-9) {
    throw std::invalid_argument("snr_boost_db: rho must not exceed 1");
  }
  return 10.0 * std::log10(1.0 / rho);
}

ComplexMatrix covariance_to_precoder(const ComplexMatrix& s, int max_rank) {
  const HermEigResult dec = herm_eig(s);
  const double largest = dec.values.size() > 0 ? std::max(dec.values(0), 0.0) : 0.0;
  const double floor = 1e-8 * largest;
  ComplexMatrix w = ComplexMatrix::Zero(s.rows(), max_rank);
  int col = 0;
  for (Eigen::Index i = 0; i < dec.values.size(); ++i) {
    if (dec.values(i) <= floor || dec.values(i) <= 0.0) continue;
    if (col >= max_rank) {
      throw std::invalid_argument("covariance_to_precoder: rank exceeds max_rank");
    }
    w.col(col++) = dec.vectors.col(i) * std::sqrt(dec.values(i));
  }
  return w;
}

void validate_covariances(const NetworkConfig& cfg, const CovarianceSet& s) {
  if (s.num_users() != cfg.num_users) {
    throw std::invalid_argument("covariance count does not match num_users");
  }
  const int m = cfg.total_antennas();
  for (const ComplexMatrix& sk : s.s) {
    if (sk.rows() != m || sk.cols() != m) {
      throw std::invalid_argument("covariance has wrong dimensions");
    }
    const HermEigResult dec = herm_eig(sk);
    const double largest = std::max(std::abs(dec.values(0)), 1.0);
    if (dec.values(dec.values.size() - 1) < -1e-9 * largest) {
      throw std::invalid_argument("covariance is not PSD within tolerance");
    }
    if (effective_rank(sk) > cfg.antennas_per_user) {
      throw std::invalid_argument("covariance rank exceeds antennas_per_user");
    }
  }
}

}  // namespace netmimo
