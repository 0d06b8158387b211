#include "grab/loss.hpp"

#include <cmath>

#include <fmt/format.h>

#include "grab/error.hpp"
#include "grab/model.hpp"

namespace grab {

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Logistic:
      return "logistic";
    case LossKind::L2Hinge:
      return "l2hinge";
  }
  return "unknown";
}

LossKind parse_loss_kind(std::string_view name) {
  if (name == "logistic") return LossKind::Logistic;
  if (name == "l2hinge" || name == "l2-hinge" || name == "squared_hinge") return LossKind::L2Hinge;
  throw ContractError(fmt::format("unknown loss '{}' (expected logistic or l2hinge)", name));
}

double loss_value(LossKind kind, double score, int label) {
  const double z = label * score;
  switch (kind) {
    case LossKind::Logistic:
      // log(1 + e^{-z}) without overflow for large |z|.
      return std::log1p(std::exp(-std::abs(z))) + std::max(0.0, -z);
    case LossKind::L2Hinge: {
      const double slack = 1.0 - z;
      return slack > 0.0 ? slack * slack : 0.0;
    }
  }
  return 0.0;
}

double loss_grad(LossKind kind, double score, int label) {
  const double z = label * score;
  switch (kind) {
    case LossKind::Logistic:
      return -label / (1.0 + std::exp(z));
    case LossKind::L2Hinge: {
      const double slack = 1.0 - z;
      return slack > 0.0 ? -2.0 * label * slack : 0.0;
    }
  }
  return 0.0;
}

double loss_curvature(LossKind kind, double score, int label) {
  const double z = label * score;
  switch (kind) {
    case LossKind::Logistic: {
      const double e = std::exp(-std::abs(z));
      return e / ((1.0 + e) * (1.0 + e));
    }
    case LossKind::L2Hinge:
      return 1.0 - z > 0.0 ? 2.0 : 0.0;
  }
  return 0.0;
}

TransactionWeighting transaction_weights(LossKind kind, std::span<const double> scores,
                                         std::span<const int> labels, double C) {
  if (!(C > 0.0)) throw ContractError("C must be positive");
  if (scores.size() != labels.size()) throw ContractError("scores and labels differ in length");
  TransactionWeighting out;
  out.alpha.resize(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out.alpha[i] = C * loss_grad(kind, scores[i], labels[i]);
    if (kind == LossKind::L2Hinge && 1.0 - labels[i] * scores[i] <= 0.0) out.zero_rows.push_back(i);
  }
  return out;
}

TransactionWeighting transaction_weights(LossKind kind, const SparseModel& model,
                                         const TransactionDatabase& db, double C) {
  std::vector<double> scores(db.size());
  for (std::size_t i = 0; i < db.size(); ++i) scores[i] = predict_score(model, db.transactions[i]);
  return transaction_weights(kind, scores, db.labels, C);
}

}  // namespace grab
