#include "netmimo/bd.hpp"

#include <cmath>

namespace netmimo {

ConvergenceError::ConvergenceError(const std::string& what,
                                   std::vector<EllipsoidTraceEntry> trace)
    : std::runtime_error(what), trace_(std::move(trace)) {}

BDNullSpace build_null_spaces(const NetworkConfig& cfg, const ChannelSet& ch) {
  BDNullSpace out;
  out.basis.reserve(cfg.num_users);
  out.effective.reserve(cfg.num_users);
  for (int k = 0; k < cfg.num_users; ++k) {
    const ComplexMatrix g = stack_complement(ch, k);
    ComplexMatrix basis = null_space_basis(g);
    if (basis.cols() != cfg.antennas_per_user) {
      throw std::runtime_error("build_null_spaces: degenerate channel, null space dimension " +
                               std::to_string(basis.cols()));
    }
    out.effective.push_back(ch.channels[k] * basis);
    out.basis.push_back(std::move(basis));
  }
  return out;
}

namespace {

// Per-antenna weights sum_j mu_j on BS j's block, as a diagonal vector.
RealVector antenna_weights(const NetworkConfig& cfg, const RealVector& mu) {
  RealVector w(cfg.total_antennas());
  for (int j = 0; j < cfg.num_bs; ++j) {
    const AntennaSpan span = bs_antenna_span(cfg, j);
    w.segment(span.first, span.count).setConstant(mu(j));
  }
  return w;
}

struct UserWaterFill {
  ComplexMatrix q;     // inner covariance, N_r x N_r
  double value = 0.0;  // ln det(I + H~ Q H~^H) - Tr(A Q)
  double rate = 0.0;   // ln det(I + H~ Q H~^H)
};

// max_{Q >= 0} ln det(I + heff Q heff^H) - Tr(A Q) by whitening with
// A^{-1/2} and water-filling at unit level.
UserWaterFill bd_user_waterfill(const ComplexMatrix& heff, const ComplexMatrix& inv_sqrt) {
  const ComplexMatrix whitened = heff * inv_sqrt;
  Eigen::JacobiSVD<ComplexMatrix> dec(whitened, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sigma = dec.singularValues();
  UserWaterFill out;
  double rate = 0.0;
  double alloc = 0.0;
  RealVector d(sigma.size());
  for (Eigen::Index s = 0; s < sigma.size(); ++s) {
    const double sig = sigma(s);
    d(s) = sig <= 1e-12 ? 0.0 : std::max(0.0, 1.0 - 1.0 / (sig * sig));
    rate += std::log1p(sig * sig * d(s));
    alloc += d(s);
  }
  const ComplexMatrix v = dec.matrixV();
  out.q = hermitize(inv_sqrt * (v * d.asDiagonal() * v.adjoint()) * inv_sqrt);
  out.value = rate - alloc;
  out.rate = rate;
  return out;
}

}  // namespace

std::vector<ComplexMatrix> bd_primal_update(const NetworkConfig& cfg,
                                            const BDNullSpace& ns,
                                            const RealVector& mu) {
  const RealVector weights = antenna_weights(cfg, mu);
  std::vector<ComplexMatrix> q;
  q.reserve(ns.num_users());
  for (int k = 0; k < ns.num_users(); ++k) {
    const ComplexMatrix a = hermitize(ns.basis[k].adjoint() * weights.asDiagonal() * ns.basis[k]);
    if (auto violation = pd_violation(a)) {
      throw NotPositiveDefiniteError(*violation, k);
    }
    q.push_back(bd_user_waterfill(ns.effective[k], psd_inv_sqrt(a)).q);
  }
  return q;
}

BDSolution bd_solve(const NetworkConfig& cfg, const ChannelSet& ch) {
  const BDNullSpace ns = build_null_spaces(cfg, ch);
  const int kt = cfg.num_bs;
  const int kr = cfg.num_users;
  const double p = cfg.bs_power;

  auto block_power = [&](const std::vector<ComplexMatrix>& s, int j) {
    const AntennaSpan span = bs_antenna_span(cfg, j);
    double acc = 0.0;
    for (const ComplexMatrix& sk : s) {
      acc += sk.diagonal().segment(span.first, span.count).real().sum();
    }
    return acc;
  };

  auto primal_at = [&](const RealVector& mu, std::vector<ComplexMatrix>& q,
                       std::vector<ComplexMatrix>& s, double& value) -> bool {
    const RealVector weights = antenna_weights(cfg, mu);
    q.clear();
    s.clear();
    value = p * mu.sum();
    for (int k = 0; k < kr; ++k) {
      const ComplexMatrix a =
          hermitize(ns.basis[k].adjoint() * weights.asDiagonal() * ns.basis[k]);
      if (pd_violation(a)) {
        return false;
      }
      const UserWaterFill wf = bd_user_waterfill(ns.effective[k], psd_inv_sqrt(a));
      value += wf.value;
      s.push_back(hermitize(ns.basis[k] * wf.q * ns.basis[k].adjoint()));
      q.push_back(wf.q);
    }
    return true;
  };

  auto oracle = [&](const RealVector& mu) -> CutOracleResult {
    for (int j = 0; j < kt; ++j) {
      if (mu(j) < 0.0) {
        RealVector g = RealVector::Zero(kt);
        g(j) = -1.0;
        return CutOracleResult::feasibility(std::move(g));
      }
    }
    const RealVector weights = antenna_weights(cfg, mu);
    for (int k = 0; k < kr; ++k) {
      const ComplexMatrix a =
          hermitize(ns.basis[k].adjoint() * weights.asDiagonal() * ns.basis[k]);
      if (auto violation = pd_violation(a)) {
        // Cut along the negative gradient of the smallest eigenvalue; the
        // eigenvector maps back to antenna space through the null-space basis.
        const ComplexVector v = ns.basis[k] * violation->eigenvector;
        RealVector g(kt);
        for (int j = 0; j < kt; ++j) {
          const AntennaSpan span = bs_antenna_span(cfg, j);
          g(j) = -v.segment(span.first, span.count).squaredNorm();
        }
        return CutOracleResult::feasibility(std::move(g));
      }
    }
    std::vector<ComplexMatrix> q, s;
    double value = 0.0;
    primal_at(mu, q, s, value);
    RealVector subgrad(kt);
    for (int j = 0; j < kt; ++j) {
      subgrad(j) = p - block_power(s, j);
    }
    return CutOracleResult::objective(std::move(subgrad), value);
  };

  const RealVector x0 = RealVector::Constant(kt, 1.0 / (p * kt));
  const double radius = 10.0 * std::max(1.0, 1.0 / p);
  // The primal recovered from the duals inherits the ellipsoid extent, not
  // the (much smaller) dual gap, so the stop is tight enough to keep the
  // covariances within the 1e-6-relative optimality band.
  MinimizeResult res;
  try {
    res = minimize(oracle, x0, radius, 1e-12, default_budget(kt));
  } catch (const InfeasibleError& e) {
    throw ConvergenceError("bd_solve: no dual-feasible point found", e.trace());
  }
  if (res.stop == StopReason::kBudget) {
    throw ConvergenceError("bd_solve: ellipsoid budget exhausted", res.trace);
  }

  // Recover the covariances at a near-optimal dual point, rescaled so the
  // loaded BS sits exactly at the budget (a common factor keeps zero leakage
  // and can only move the objective toward the optimum). Both the final
  // center and the best-value iterate are valid candidates; keep the better.
  struct Candidate {
    std::vector<ComplexMatrix> q;
    std::vector<ComplexMatrix> s;
    std::vector<double> rates;
    double sum_rate = -1.0;
  };
  auto recover = [&](const RealVector& mu) {
    Candidate cand;
    double value = 0.0;
    if (!primal_at(mu, cand.q, cand.s, value)) {
      return cand;
    }
    double max_power = 0.0;
    for (int j = 0; j < kt; ++j) {
      max_power = std::max(max_power, block_power(cand.s, j));
    }
    if (max_power > 1e-300) {
      const double zeta = p / max_power;
      for (int k = 0; k < kr; ++k) {
        cand.q[k] *= zeta;
        cand.s[k] *= zeta;
      }
    }
    cand.rates.resize(kr);
    cand.sum_rate = 0.0;
    for (int k = 0; k < kr; ++k) {
      const ComplexMatrix gram =
          hermitize(ns.effective[k] * cand.q[k] * ns.effective[k].adjoint());
      const ComplexMatrix eye = ComplexMatrix::Identity(gram.rows(), gram.cols());
      cand.rates[k] = log_det_psd(eye + gram);
      cand.sum_rate += cand.rates[k];
    }
    return cand;
  };

  Candidate chosen = recover(res.last_point);
  RealVector mu = res.last_point;
  if (res.best_point != res.last_point) {
    Candidate alt = recover(res.best_point);
    if (alt.sum_rate > chosen.sum_rate) {
      chosen = std::move(alt);
      mu = res.best_point;
    }
  }
  if (chosen.sum_rate < 0.0) {
    throw ConvergenceError("bd_solve: converged duals are not positive definite", res.trace);
  }

  BDSolution out;
  out.mu = std::move(mu);
  out.dual_value = res.best_value;
  out.iterations = res.iterations;
  out.q = std::move(chosen.q);
  out.covariances.s = std::move(chosen.s);
  out.rate_targets = std::move(chosen.rates);
  out.sum_rate_nats = chosen.sum_rate;
  return out;
}

}  // namespace netmimo
