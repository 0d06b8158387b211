#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "grab/datakit.hpp"
#include "grab/miner.hpp"

namespace grab {

class SparseModel;

enum class LossKind {
  Logistic,  ///< log(1 + exp(-y f))
  L2Hinge,   ///< (1 - y f)^2 when the margin is violated, else 0
};

std::string_view to_string(LossKind kind);
/// "logistic" or "l2hinge". Throws ContractError otherwise.
LossKind parse_loss_kind(std::string_view name);

double loss_value(LossKind kind, double score, int label);
/// d loss / d score. The squared hinge has derivative 0 at margin exactly 1.
double loss_grad(LossKind kind, double score, int label);
/// Second derivative in the score; for the squared hinge, 2 inside the
/// violated region and 0 elsewhere.
double loss_curvature(LossKind kind, double score, int label);

struct TransactionWeighting {
  /// alpha_i = C * d loss / d score at example i.
  TransactionWeights alpha;
  /// Rows whose weight is exactly zero because the hinge margin is met.
  /// Always empty for the logistic loss.
  std::vector<std::size_t> zero_rows;
};

TransactionWeighting transaction_weights(LossKind kind, std::span<const double> scores,
                                         std::span<const int> labels, double C);
TransactionWeighting transaction_weights(LossKind kind, const SparseModel& model,
                                         const TransactionDatabase& db, double C);

}  // namespace grab
