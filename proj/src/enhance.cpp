#include "netmimo/enhance.hpp"

#include <cmath>

namespace netmimo {

RealVector DualPoint::full_mu() const {
  RealVector mu(mu_head.size() + 1);
  mu.head(mu_head.size()) = mu_head;
  mu(mu_head.size()) = mu_last();
  return mu;
}

RealVector DualPoint::stacked() const {
  RealVector x(lambda.size() + mu_head.size());
  x.head(lambda.size()) = lambda;
  x.tail(mu_head.size()) = mu_head;
  return x;
}

DualPoint DualPoint::from_stacked(const RealVector& x, int num_users, int num_bs,
                                  double power_budget) {
  if (x.size() != num_users + num_bs - 1) {
    throw std::invalid_argument("DualPoint::from_stacked: wrong dimension");
  }
  DualPoint d;
  d.lambda = x.head(num_users);
  d.mu_head = x.tail(num_bs - 1);
  d.power_budget = power_budget;
  return d;
}

RateLinearization linearize_rates(const ChannelSet& ch, const BDSolution& bd) {
  RateLinearization out;
  const int num_users = ch.num_users();
  out.gradient.reserve(num_users);
  out.rate_targets = bd.rate_targets;
  for (int k = 0; k < num_users; ++k) {
    const ComplexMatrix& h = ch.channels[k];
    const ComplexMatrix gram = hermitize(h * bd.covariances.s[k] * h.adjoint());
    const ComplexMatrix eye = ComplexMatrix::Identity(gram.rows(), gram.cols());
    const ComplexMatrix inner = hermitize(eye - (eye + gram).inverse());
    out.gradient.push_back(hermitize(h.adjoint() * inner * h));
  }
  return out;
}

namespace {

ComplexMatrix assemble_cost_matrix(const NetworkConfig& cfg, const RateLinearization& lin,
                                   const DualPoint& d, int user) {
  const int m = cfg.total_antennas();
  const RealVector mu = d.full_mu();
  ComplexMatrix c = ComplexMatrix::Zero(m, m);
  for (int j = 0; j < cfg.num_bs; ++j) {
    const AntennaSpan span = bs_antenna_span(cfg, j);
    for (int i = 0; i < span.count; ++i) {
      c(span.first + i, span.first + i) += mu(j);
    }
  }
  for (int i = 0; i < lin.num_users(); ++i) {
    if (i == user) continue;
    c += d.lambda(i) * lin.gradient[i];
  }
  return hermitize(c);
}

struct UserSolve {
  ComplexMatrix s;         // maximizer S_k
  double log_det = 0.0;    // ln det(I + H S H^H)
  double alloc_sum = 0.0;  // Tr(C S), equal to the total water-filling allocation
};

UserSolve solve_user(const ComplexMatrix& h, const ComplexMatrix& inv_sqrt, double level) {
  Eigen::JacobiSVD<ComplexMatrix> dec(h * inv_sqrt, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sigma = dec.singularValues();
  UserSolve out;
  RealVector d(sigma.size());
  for (Eigen::Index s = 0; s < sigma.size(); ++s) {
    const double sig = sigma(s);
    d(s) = sig <= 1e-12 ? 0.0 : std::max(0.0, level - 1.0 / (sig * sig));
    out.log_det += std::log1p(sig * sig * d(s));
    out.alloc_sum += d(s);
  }
  const ComplexMatrix v = dec.matrixV();
  out.s = hermitize(inv_sqrt * (v * d.asDiagonal() * v.adjoint()) * inv_sqrt);
  return out;
}

// Cost matrix, its positive definiteness, and (when PD) its inverse square
// root, from a single eigendecomposition.
struct CostFactor {
  ComplexMatrix matrix;
  std::optional<PdViolation> violation;
  ComplexMatrix inv_sqrt;
};

CostFactor factor_user_cost(const NetworkConfig& cfg, const RateLinearization& lin,
                            const DualPoint& d, int user) {
  CostFactor out;
  out.matrix = assemble_cost_matrix(cfg, lin, d, user);
  const HermEigResult dec = herm_eig(out.matrix);
  const auto n = dec.values.size();
  const double max_abs = std::max(std::abs(dec.values(0)), std::abs(dec.values(n - 1)));
  const double min_eig = dec.values(n - 1);
  if (min_eig < pd_threshold(max_abs)) {
    out.violation = PdViolation{min_eig, dec.vectors.col(n - 1)};
    return out;
  }
  const RealVector inv_sqrt = dec.values.array().sqrt().inverse();
  out.inv_sqrt = hermitize(dec.vectors * inv_sqrt.asDiagonal() * dec.vectors.adjoint());
  return out;
}

double block_power(const NetworkConfig& cfg, const ComplexMatrix& s, int j) {
  const AntennaSpan span = bs_antenna_span(cfg, j);
  return s.diagonal().segment(span.first, span.count).real().sum();
}

}  // namespace

UserCost assemble_user_cost(const NetworkConfig& cfg, const RateLinearization& lin,
                            const DualPoint& d, int user) {
  const CostFactor f = factor_user_cost(cfg, lin, d, user);
  return UserCost{f.matrix, f.violation};
}

RealVector water_fill(double level, const RealVector& singular_values) {
  RealVector d(singular_values.size());
  for (Eigen::Index s = 0; s < singular_values.size(); ++s) {
    const double sig = singular_values(s);
    d(s) = sig <= 1e-12 ? 0.0 : std::max(0.0, level - 1.0 / (sig * sig));
  }
  return d;
}

ComplexMatrix primal_update(const NetworkConfig& cfg, const ChannelSet& ch,
                            const RateLinearization& lin, const DualPoint& d, int user) {
  const CostFactor f = factor_user_cost(cfg, lin, d, user);
  if (f.violation) {
    throw NotPositiveDefiniteError(*f.violation, user);
  }
  return solve_user(ch.channels[user], f.inv_sqrt, d.lambda(user)).s;
}

DualEval dual_value_and_subgradients(const NetworkConfig& cfg, const ChannelSet& ch,
                                     const RateLinearization& lin, const DualPoint& d) {
  const int kr = cfg.num_users;
  const int kt = cfg.num_bs;
  DualEval out;
  out.primal.s.reserve(kr);
  out.subgrad_lambda = RealVector::Zero(kr);
  out.subgrad_mu = RealVector::Zero(kt - 1);

  std::vector<double> log_dets(kr);
  double value = 0.0;
  for (int k = 0; k < kr; ++k) {
    const CostFactor f = factor_user_cost(cfg, lin, d, k);
    if (f.violation) {
      throw NotPositiveDefiniteError(*f.violation, k);
    }
    const UserSolve sol = solve_user(ch.channels[k], f.inv_sqrt, d.lambda(k));
    log_dets[k] = sol.log_det;
    value += d.lambda(k) * (sol.log_det - lin.rate_targets[k]) - sol.alloc_sum;
    out.primal.s.push_back(sol.s);
  }
  out.value = value;

  const int m = cfg.total_antennas();
  ComplexMatrix total = ComplexMatrix::Zero(m, m);
  for (const ComplexMatrix& sk : out.primal.s) {
    total += sk;
  }
  for (int k = 0; k < kr; ++k) {
    const double cross =
        (lin.gradient[k] * (total - out.primal.s[k])).trace().real();
    out.subgrad_lambda(k) = log_dets[k] - cross - lin.rate_targets[k];
  }
  const double last_power = block_power(cfg, total, kt - 1);
  for (int j = 0; j + 1 < kt; ++j) {
    out.subgrad_mu(j) = last_power - block_power(cfg, total, j);
  }
  return out;
}

CovarianceSet rescale_covariances(const CovarianceSet& s, double rho) {
  if (!(rho > 0.0)) {
    throw std::invalid_argument("rescale_covariances: rho must be positive");
  }
  CovarianceSet out;
  out.s.reserve(s.s.size());
  for (const ComplexMatrix& sk : s.s) {
    out.s.push_back(sk / rho);
  }
  return out;
}

EnhanceSolution solve_enhanced(const NetworkConfig& cfg, const ChannelSet& ch,
                               const BDSolution& bd) {
  const int kr = cfg.num_users;
  const int kt = cfg.num_bs;
  const int m = cfg.total_antennas();
  const double p = cfg.bs_power;
  const double lambda_cap = 1e6;

  EnhanceSolution out;

  double bd_total_power = 0.0;
  for (const ComplexMatrix& sk : bd.covariances.s) {
    bd_total_power += sk.diagonal().real().sum();
  }
  if (bd_total_power <= 1e-12 * p) {
    // Zero-power seed: nothing to minimize, keep the all-zero solution.
    out.minimized = CovarianceSet::zeros(kr, m);
    out.proposed = out.minimized;
    out.rho = 1.0;
    out.rates.assign(kr, 0.0);
    out.dual.lambda = RealVector::Zero(kr);
    out.dual.mu_head = RealVector::Zero(kt - 1);
    out.dual.power_budget = p;
    return out;
  }

  const RateLinearization lin = linearize_rates(ch, bd);
  const int n = kr + kt - 1;

  // Captured by the oracle: the primal state of the most recent objective
  // evaluation (the converged point once the stop rule fires).
  CovarianceSet last_primal;
  double last_rho = 1.0;
  double last_value = 0.0;
  int iteration = 0;

  auto oracle = [&](const RealVector& x) -> CutOracleResult {
    const int it = iteration++;
    const DualPoint d = DualPoint::from_stacked(x, kr, kt, p);
    auto feasibility = [&](RealVector g) {
      out.trace.push_back({it, CutKind::kFeasibility, 0.0, 0.0});
      return CutOracleResult::feasibility(std::move(g));
    };

    for (int k = 0; k < kr; ++k) {
      if (d.lambda(k) < 0.0) {
        RealVector g = RealVector::Zero(n);
        g(k) = -1.0;
        return feasibility(std::move(g));
      }
      if (d.lambda(k) > lambda_cap) {
        RealVector g = RealVector::Zero(n);
        g(k) = 1.0;
        return feasibility(std::move(g));
      }
    }
    for (int j = 0; j + 1 < kt; ++j) {
      if (d.mu_head(j) < 0.0) {
        RealVector g = RealVector::Zero(n);
        g(kr + j) = -1.0;
        return feasibility(std::move(g));
      }
    }
    if (d.mu_head.sum() > 1.0 / p) {
      RealVector g = RealVector::Zero(n);
      g.tail(kt - 1).setOnes();
      return feasibility(std::move(g));
    }
    for (int k = 0; k < kr; ++k) {
      const CostFactor f = factor_user_cost(cfg, lin, d, k);
      if (f.violation) {
        // Cut along the negative gradient of the smallest eigenvalue of C_k
        // with respect to the reduced duals (the eliminated multiplier makes
        // the mu entries q^H (B_j - B_last) q).
        const ComplexVector& q = f.violation->eigenvector;
        RealVector g = RealVector::Zero(n);
        for (int i = 0; i < kr; ++i) {
          if (i == k) continue;
          g(i) = -(q.adjoint() * lin.gradient[i] * q)(0).real();
        }
        RealVector band(kt);
        for (int j = 0; j < kt; ++j) {
          const AntennaSpan span = bs_antenna_span(cfg, j);
          band(j) = q.segment(span.first, span.count).squaredNorm();
        }
        for (int j = 0; j + 1 < kt; ++j) {
          g(kr + j) = -(band(j) - band(kt - 1));
        }
        return feasibility(std::move(g));
      }
    }

    const DualEval ev = dual_value_and_subgradients(cfg, ch, lin, d);
    double max_power = 0.0;
    ComplexMatrix total = ComplexMatrix::Zero(m, m);
    for (const ComplexMatrix& sk : ev.primal.s) {
      total += sk;
    }
    for (int j = 0; j < kt; ++j) {
      max_power = std::max(max_power, block_power(cfg, total, j));
    }
    const double rho = max_power / p;
    double scaled_rate = 0.0;
    if (rho > 1e-14) {
      scaled_rate = sum_rate_nats(ch, rescale_covariances(ev.primal, rho));
    }
    out.trace.push_back({it, CutKind::kObjective, rho, scaled_rate});

    last_primal = ev.primal;
    last_rho = rho;
    last_value = ev.value;

    RealVector g(n);
    g.head(kr) = ev.subgrad_lambda;
    g.tail(kt - 1) = ev.subgrad_mu;
    return CutOracleResult::objective(std::move(g), ev.value);
  };

  RealVector x0(n);
  x0.head(kr).setConstant(0.1);
  x0.tail(kt - 1).setConstant(1.0 / (p * kt));
  const double radius = 10.0 * std::max({1.0, 1.0 / p, 0.1 * kr});

  MinimizeResult res;
  try {
    res = minimize(oracle, x0, radius, 1e-6, default_budget(n));
  } catch (const InfeasibleError& e) {
    throw ConvergenceError("solve_enhanced: no dual-feasible point found", e.trace());
  }
  if (res.stop == StopReason::kBudget) {
    throw ConvergenceError("solve_enhanced: ellipsoid budget exhausted", res.trace);
  }

  out.dual = DualPoint::from_stacked(res.last_point, kr, kt, p);
  out.dual_value = last_value;
  out.iterations = res.iterations;
  if (last_rho > 1.0 || last_rho <= 0.0) {
    // The seed covariances are feasible with power factor 1, so they beat any
    // converged point that overshoots the budget (possible only through
    // finite dual accuracy when the optimal factor sits at 1).
    out.minimized = bd.covariances;
    out.rho = 1.0;
  } else {
    out.minimized = std::move(last_primal);
    out.rho = last_rho;
  }
  out.proposed = rescale_covariances(out.minimized, out.rho);
  out.rates.resize(kr);
  out.sum_rate_nats = 0.0;
  for (int k = 0; k < kr; ++k) {
    out.rates[k] = user_rate(ch, out.proposed, k);
    out.sum_rate_nats += out.rates[k];
  }
  out.best_scaled_sum_rate = 0.0;
  for (const EnhanceIterate& e : out.trace) {
    if (e.kind == CutKind::kObjective) {
      out.best_scaled_sum_rate = std::max(out.best_scaled_sum_rate, e.scaled_sum_rate);
    }
  }
  return out;
}

std::vector<double> zf_sinr_targets(const NetworkConfig& cfg, const BDSolution& bd) {
  if (cfg.antennas_per_user != 1) {
    throw std::invalid_argument("zf_sinr_targets: requires single-antenna users");
  }
  std::vector<double> targets(bd.rate_targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k) {
    targets[k] = std::expm1(bd.rate_targets[k]);
  }
  return targets;
}

MisoPowerMinSolution solve_miso_power_min(const NetworkConfig& cfg, const ChannelSet& ch,
                                          const std::vector<double>& sinr_targets) {
  if (cfg.antennas_per_user != 1) {
    throw std::invalid_argument("solve_miso_power_min: requires single-antenna users");
  }
  const int kr = cfg.num_users;
  const int kt = cfg.num_bs;
  const int m = cfg.total_antennas();
  const double p = cfg.bs_power;
  if (static_cast<int>(sinr_targets.size()) != kr) {
    throw std::invalid_argument("solve_miso_power_min: one SINR target per user required");
  }

  // Users with a zero target transmit nothing and impose no constraint.
  std::vector<int> active;
  for (int k = 0; k < kr; ++k) {
    if (sinr_targets[k] > 0.0) active.push_back(k);
  }
  const int na = static_cast<int>(active.size());
  MisoPowerMinSolution out;
  out.precoders.assign(kr, ComplexVector::Zero(m));
  if (na == 0) {
    out.rho = 0.0;
    return out;
  }

  // Real stack per user: x = [Re w; Im w]. The phase constraint
  // Im(h_k w_k) = 0 removes one direction; columns 2..2M of the Householder Q
  // of that direction form the per-user reduced basis.
  const int nx = 2 * m;
  const int ny = nx - 1;
  const int n = na * ny;

  std::vector<RealVector> re_row(kr), im_row(kr); // coefficient vectors of Re/Im(h_k w)
  std::vector<RealMatrix> basis(na);
  std::vector<double> alpha(kr, 0.0);
  for (int k = 0; k < kr; ++k) {
    const ComplexMatrix& h = ch.channels[k];
    RealVector a(m), b(m);
    for (int i = 0; i < m; ++i) {
      a(i) = h(0, i).real();
      b(i) = h(0, i).imag();
    }
    re_row[k] = RealVector(nx);
    re_row[k] << a, -b;
    im_row[k] = RealVector(nx);
    im_row[k] << b, a;
    if (sinr_targets[k] > 0.0) {
      alpha[k] = std::sqrt(1.0 + 1.0 / sinr_targets[k]);
    }
  }
  for (int idx = 0; idx < na; ++idx) {
    const int k = active[idx];
    Eigen::HouseholderQR<RealMatrix> qr(im_row[k]);
    const RealMatrix q = qr.householderQ();
    basis[idx] = q.rightCols(ny);
  }

  auto unpack = [&](const RealVector& y, std::vector<ComplexVector>& w) {
    for (int idx = 0; idx < na; ++idx) {
      const RealVector x = basis[idx] * y.segment(idx * ny, ny);
      ComplexVector wk(m);
      for (int i = 0; i < m; ++i) {
        wk(i) = std::complex<double>(x(i), x(m + i));
      }
      w[active[idx]] = std::move(wk);
    }
  };

  auto oracle = [&](const RealVector& y) -> CutOracleResult {
    std::vector<ComplexVector> w(kr, ComplexVector::Zero(m));
    unpack(y, w);

    // SINR cone constraints: alpha_k Re(h_k w_k) >= ||[h_k w_1 .. h_k w_Kr, 1]||.
    double worst_violation = 0.0;
    int worst_k = -1;
    RealMatrix z_re(kr, kr), z_im(kr, kr);
    RealVector rhs(kr);
    for (int row = 0; row < na; ++row) {
      const int k = active[row];
      double norm_sq = 1.0;
      for (int i = 0; i < kr; ++i) {
        const std::complex<double> z = (ch.channels[k] * w[i])(0);
        z_re(k, i) = z.real();
        z_im(k, i) = z.imag();
        norm_sq += std::norm(z);
      }
      rhs(k) = std::sqrt(norm_sq);
      const double lhs = alpha[k] * z_re(k, k);
      const double violation = rhs(k) - lhs - 1e-9 * std::max(1.0, rhs(k));
      if (violation > worst_violation) {
        worst_violation = violation;
        worst_k = k;
      }
    }
    if (worst_k >= 0) {
      const int k = worst_k;
      RealVector g = RealVector::Zero(n);
      for (int idx = 0; idx < na; ++idx) {
        const int i = active[idx];
        RealVector coef = (z_re(k, i) * re_row[k] + z_im(k, i) * im_row[k]) / rhs(k);
        if (i == k) {
          coef -= alpha[k] * re_row[k];
        }
        g.segment(idx * ny, ny) = basis[idx].transpose() * coef;
      }
      return CutOracleResult::feasibility(std::move(g));
    }

    // Objective: max per-BS power ratio.
    double max_power = 0.0;
    int argmax_j = 0;
    for (int j = 0; j < kt; ++j) {
      const AntennaSpan span = bs_antenna_span(cfg, j);
      double acc = 0.0;
      for (int k = 0; k < kr; ++k) {
        acc += w[k].segment(span.first, span.count).squaredNorm();
      }
      if (acc > max_power) {
        max_power = acc;
        argmax_j = j;
      }
    }
    const AntennaSpan span = bs_antenna_span(cfg, argmax_j);
    RealVector g = RealVector::Zero(n);
    for (int idx = 0; idx < na; ++idx) {
      const int k = active[idx];
      RealVector masked = RealVector::Zero(nx);
      for (int i = 0; i < span.count; ++i) {
        masked(span.first + i) = 2.0 * w[k](span.first + i).real() / p;
        masked(m + span.first + i) = 2.0 * w[k](span.first + i).imag() / p;
      }
      g.segment(idx * ny, ny) = basis[idx].transpose() * masked;
    }
    return CutOracleResult::objective(std::move(g), max_power / p);
  };

  // Start from the zero-forcing precoders, phase-rotated so h_k w_k is real
  // positive (they are feasible at power ratio 1).
  RealVector y0 = RealVector::Zero(n);
  {
    const BDSolution bd = bd_solve(cfg, ch);
    for (int idx = 0; idx < na; ++idx) {
      const int k = active[idx];
      ComplexVector wk = covariance_to_precoder(bd.covariances.s[k], 1).col(0);
      const std::complex<double> z = (ch.channels[k] * wk)(0);
      if (std::abs(z) > 0.0) {
        wk *= std::conj(z) / std::abs(z);
      }
      RealVector x(nx);
      for (int i = 0; i < m; ++i) {
        x(i) = wk(i).real();
        x(m + i) = wk(i).imag();
      }
      y0.segment(idx * ny, ny) = basis[idx].transpose() * x;
    }
  }
  const double radius = 2.0 * std::sqrt(p * kt) + 1.0;

  MinimizeResult res;
  try {
    res = minimize(oracle, y0, radius, 1e-6, default_budget(n));
  } catch (const InfeasibleError& e) {
    throw ConvergenceError("solve_miso_power_min: no feasible point found", e.trace());
  }
  if (res.stop == StopReason::kBudget) {
    throw ConvergenceError("solve_miso_power_min: ellipsoid budget exhausted", res.trace);
  }

  unpack(res.best_point, out.precoders);
  out.rho = res.best_value;
  out.iterations = res.iterations;
  return out;
}

}  // namespace netmimo
