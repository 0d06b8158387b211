#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "grab/datakit.hpp"
#include "grab/itemset.hpp"
#include "grab/loss.hpp"

namespace grab {

class SparseModel;

/// Rows (transaction indices, ascending) on which a feature is 1.
using FeatureColumn = std::vector<std::uint32_t>;

FeatureColumn feature_column(const TransactionDatabase& db, const Itemset& p);

struct SolverOptions {
  /// Stop once every active residual is at or below this.
  double tolerance = 1e-6;
  std::size_t max_sweeps = 1000;
};

/// Minimise C * sum_i loss(f(x_i), y_i) + |w|_1 over the listed features only.
struct ActiveProblem {
  const TransactionDatabase& db;
  LossKind loss = LossKind::Logistic;
  double C = 1.0;
  std::vector<Itemset> features;
  /// Same length as `features`; empty means start from zero.
  std::vector<double> warm_start;
  SolverOptions options;
};

struct SolveResult {
  std::vector<double> weights;
  /// Per-feature optimality residual at the returned weights.
  std::vector<double> residuals;
  /// Per-transaction scores at the returned weights.
  std::vector<double> scores;
  double objective = 0.0;
  double max_residual = 0.0;
  std::size_t sweeps = 0;
  bool converged = false;
};

/// Cyclic coordinate descent. The squared hinge coordinate problem is
/// piecewise quadratic and is minimised exactly; the logistic one takes a
/// proximal Newton step with backtracking. Never increases the objective.
/// Throws NumericError if the loss becomes non-finite.
SolveResult optimize_active(const ActiveProblem& problem);

/// Same solver on precomputed columns.
SolveResult optimize_columns(std::span<const FeatureColumn> columns, std::span<const int> labels,
                             LossKind loss, double C, std::span<const double> warm_start,
                             const SolverOptions& options = {});

/// C * sum of losses + L1 norm.
double objective_value(LossKind loss, double C, std::span<const double> scores,
                       std::span<const int> labels, std::span<const double> weights);

/// Optimality residual of one coordinate given g = C * dL/dw:
/// |g + sgn(w)| when w != 0, max(|g| - 1, 0) when w == 0.
double coordinate_residual(double scaled_grad, double weight);

/// Residual for every stored weight of `model`, in the model's itemset order.
std::vector<double> active_residual(const TransactionDatabase& db, LossKind loss, double C,
                                    const SparseModel& model);

}  // namespace grab
