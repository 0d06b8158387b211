#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "grab/datakit.hpp"
#include "grab/itemset.hpp"
#include "grab/loss.hpp"
#include "grab/miner.hpp"
#include "grab/model.hpp"
#include "grab/solver.hpp"

namespace grab {

struct GrabConfig {
  double C = 1.0;
  /// Maximum conjunction size.
  DegreeCap k;
  LossKind loss = LossKind::Logistic;
  /// Features moved into the active set per round. 1 gives classical grafting.
  std::size_t batch_size = 10;
  /// Stop once suboptimality drops below epsilon times its initial value.
  double epsilon = 0.01;
  std::size_t max_iterations = 10000;
  /// Mining threshold starts at 2^initial_exponent.
  int initial_exponent = 10;
  /// Per-round mining output cap; 0 selects 100 * batch_size.
  std::size_t emission_cap = 0;
  /// Drop rows with zero transaction weight before mining (squared hinge only).
  bool prune_zero_rows = true;
  SolverOptions solver;

  /// Throws ContractError on nonpositive values or epsilon outside (0, 1).
  void validate() const;
};

enum class StopReason {
  Suboptimality,  ///< V < epsilon * V0
  NoCandidates,   ///< nothing outside the active set clears |frq| > 1
  IterationCap,
};

struct TraceRow {
  std::size_t iteration = 0;
  std::size_t active = 0;
  double suboptimality = 0.0;
  double objective = 0.0;
  /// Itemsets returned by this round's mining, active ones excluded.
  std::size_t mined = 0;
  double seconds = 0.0;
  int exponent = 0;
  bool best_effort = false;
  bool solver_converged = true;
  /// Features that entered the active set before this round's solve, with
  /// the weighted frequency they were selected on.
  std::vector<MinedCandidate> added;
};

struct TrainTrace {
  std::vector<TraceRow> rows;
  double initial_suboptimality = 0.0;
  StopReason stop = StopReason::NoCandidates;
  /// True when the outer loop ran out of iterations.
  bool warning = false;
};

struct TrainResult {
  SparseModel model;
  TrainTrace trace;
};

/// Grafting driven by weighted itemset mining.
///
/// Each round computes transaction weights C * dloss/dscore at the current
/// model, mines the top `batch_size` itemsets by |weighted frequency| among
/// those above 1 and not yet active, adds them to the active set, and
/// re-optimises the active weights from a warm start. Weights that end at
/// zero are dropped from the returned model.
TrainResult train(const TransactionDatabase& db, const GrabConfig& config);

/// V = sum of active residuals + sum over inactive candidates of
/// max(|frq| - 1, 0). `mined` must use weights that already carry C.
double suboptimality(std::span<const double> active_residuals,
                     std::span<const MinedCandidate> mined);

/// V at `model` with its stored weights as the active set. Mined candidates
/// that are stored in the model are skipped.
double suboptimality(const TransactionDatabase& db, const GrabConfig& config,
                     const SparseModel& model, std::span<const MinedCandidate> mined);

/// C * sum of losses + L1 norm of `model` on `db`.
double objective_value(const SparseModel& model, const TransactionDatabase& db, LossKind loss,
                       double C);

}  // namespace grab
