#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "netmimo/linalg.hpp"

namespace netmimo {

enum class CutKind { kObjective, kFeasibility };

/// One oracle answer: a feasibility cut (g separates the query point from the
/// feasible set) or an objective cut (g is a subgradient of the objective at
/// the query point, value its objective value).
struct CutOracleResult {
  CutKind kind = CutKind::kObjective;
  RealVector g;
  double value = 0.0;

  static CutOracleResult objective(RealVector g, double value);
  static CutOracleResult feasibility(RealVector g);
};

/// Ellipsoid {y : (y - center)^T shape^{-1} (y - center) <= 1}.
struct EllipsoidState {
  RealVector center;
  RealMatrix shape;
  int iteration = 0;

  int dim() const { return static_cast<int>(center.size()); }
};

struct EllipsoidTraceEntry {
  int iteration = 0;
  CutKind kind = CutKind::kObjective;
  double value = 0.0;    // objective value, meaningful for objective cuts
  double cut_norm = 0.0; // sqrt(g^T E g) for the emitted cut
};

enum class StopReason { kCutNorm, kBudget };

struct MinimizeResult {
  RealVector best_point;          // feasible point with the lowest objective
  double best_value = 0.0;
  RealVector last_point;          // point of the final objective evaluation
  double last_value = 0.0;
  int iterations = 0;
  StopReason stop = StopReason::kCutNorm;
  std::vector<EllipsoidTraceEntry> trace;
};

/// Raised when the oracle never produced an objective cut within the budget.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(std::vector<EllipsoidTraceEntry> trace);
  const std::vector<EllipsoidTraceEntry>& trace() const { return trace_; }

 private:
  std::vector<EllipsoidTraceEntry> trace_;
};

/// Ball of the given radius centered at x0.
EllipsoidState init_ellipsoid(const RealVector& x0, double radius);

/// Central cut through the center along g. For dim >= 2 this is the standard
/// update
///   x+ = x - E g / ((n+1) sqrt(g^T E g)),
///   E+ = n^2/(n^2-1) (E - 2/(n+1) E g g^T E / (g^T E g));
/// dim 1 degenerates to interval halving. The shape matrix is re-symmetrized
/// each step and nudged by 1e-14 tr(E)/n I if its Cholesky fails.
EllipsoidState cut_update(const EllipsoidState& st, const RealVector& g);

using CutOracle = std::function<CutOracleResult(const RealVector&)>;

constexpr int default_budget(int dim) { return 200 * dim * dim; }

/// Central-cut ellipsoid minimization. Calls the oracle once per iteration at
/// the current center, applies the returned cut, and stops when
/// sqrt(g^T E g) <= stop_tol for the current cut vector or at max_iter.
/// Returns the best feasible iterate, the last objective iterate, and the cut
/// trace. Throws InfeasibleError when no feasible point was seen.
MinimizeResult minimize(const CutOracle& oracle, const RealVector& x0,
                        double radius, double stop_tol, int max_iter);

}  // namespace netmimo
