#include "netmimo/ellipsoid.hpp"

#include <cmath>
#include <limits>

namespace netmimo {

CutOracleResult CutOracleResult::objective(RealVector g, double value) {
  return CutOracleResult{CutKind::kObjective, std::move(g), value};
}

CutOracleResult CutOracleResult::feasibility(RealVector g) {
  return CutOracleResult{CutKind::kFeasibility, std::move(g), 0.0};
}

InfeasibleError::InfeasibleError(std::vector<EllipsoidTraceEntry> trace)
    : std::runtime_error("no feasible point found within the iteration budget"),
      trace_(std::move(trace)) {}

EllipsoidState init_ellipsoid(const RealVector& x0, double radius) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("init_ellipsoid: radius must be positive");
  }
  const auto n = x0.size();
  if (n < 1) {
    throw std::invalid_argument("init_ellipsoid: dimension must be at least 1");
  }
  return EllipsoidState{x0, radius * radius * RealMatrix::Identity(n, n), 0};
}

EllipsoidState cut_update(const EllipsoidState& st, const RealVector& g) {
  const auto n = st.dim();
  if (g.size() != n || g.isZero(0.0) || !g.allFinite()) {
    throw std::invalid_argument("cut_update: cut vector must be finite and nonzero");
  }
  const double quad = g.dot(st.shape * g);
  if (!(quad > 0.0)) {
    throw std::invalid_argument("cut_update: g^T E g must be positive");
  }

  EllipsoidState next;
  next.iteration = st.iteration + 1;
  if (n == 1) {
    // Interval halving: keep the half interval on the non-cut side.
    const double r = std::sqrt(st.shape(0, 0));
    const double sign = g(0) > 0.0 ? 1.0 : -1.0;
    next.center = st.center;
    next.center(0) -= sign * r / 2.0;
    next.shape = RealMatrix::Constant(1, 1, r * r / 4.0);
    return next;
  }

  const RealVector eg = st.shape * g / std::sqrt(quad);
  const double nd = static_cast<double>(n);
  next.center = st.center - eg / (nd + 1.0);
  next.shape = (nd * nd) / (nd * nd - 1.0) *
               (st.shape - (2.0 / (nd + 1.0)) * (eg * eg.transpose()));
  next.shape = 0.5 * (next.shape + next.shape.transpose());
  Eigen::LLT<RealMatrix> llt(next.shape);
  if (llt.info() != Eigen::Success) {
    next.shape += 1e-14 * (next.shape.trace() / nd) * RealMatrix::Identity(n, n);
  }
  return next;
}

MinimizeResult minimize(const CutOracle& oracle, const RealVector& x0,
                        double radius, double stop_tol, int max_iter) {
  if (!(stop_tol > 0.0)) {
    throw std::invalid_argument("minimize: stop_tol must be positive");
  }
  EllipsoidState st = init_ellipsoid(x0, radius);
  MinimizeResult out;
  out.best_value = std::numeric_limits<double>::infinity();
  bool have_feasible = false;
  out.stop = StopReason::kBudget;

  for (int it = 0; it < max_iter; ++it) {
    const CutOracleResult res = oracle(st.center);
    if (res.kind == CutKind::kObjective) {
      out.last_point = st.center;
      out.last_value = res.value;
      if (!have_feasible || res.value < out.best_value) {
        out.best_point = st.center;
        out.best_value = res.value;
      }
      have_feasible = true;
    }
    if (res.kind == CutKind::kObjective && res.g.isZero(0.0)) {
      // Zero subgradient: the center is optimal.
      out.trace.push_back({it, res.kind, res.value, 0.0});
      out.iterations = it + 1;
      out.stop = StopReason::kCutNorm;
      break;
    }
    const double cut_norm = std::sqrt(std::max(res.g.dot(st.shape * res.g), 0.0));
    out.trace.push_back(
        {it, res.kind, res.kind == CutKind::kObjective ? res.value : 0.0, cut_norm});
    out.iterations = it + 1;
    if (cut_norm <= stop_tol) {
      out.stop = StopReason::kCutNorm;
      break;
    }
    st = cut_update(st, res.g);
  }

  if (!have_feasible) {
    throw InfeasibleError(std::move(out.trace));
  }
  return out;
}

}  // namespace netmimo
