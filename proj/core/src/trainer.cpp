#include "grab/trainer.hpp"

#include <chrono>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "grab/error.hpp"

namespace grab {

namespace {

using Clock = std::chrono::steady_clock;

double candidate_term(std::span<const MinedCandidate> mined) {
  double v = 0.0;
  for (const auto& c : mined) v += std::max(std::abs(c.weighted_frequency) - 1.0, 0.0);
  return v;
}

// Owns the mutable state of one training run.
class Trainer {
 public:
  Trainer(const TransactionDatabase& db, const GrabConfig& config)
      : db_(db), config_(config), scores_(db.size(), 0.0),
        miner_(TopKOptions{config.batch_size, config.k, config.emission_cap, config.initial_exponent}) {}

  TrainResult run() {
    const auto start = Clock::now();
    TrainTrace trace;

    auto round = mine();
    trace.initial_suboptimality = candidate_term(round.mined);
    {
      TraceRow row;
      row.objective = objective_value(config_.loss, config_.C, scores_, db_.labels, weights_);
      row.suboptimality = trace.initial_suboptimality;
      row.mined = round.mined.size();
      row.exponent = round.exponent;
      row.best_effort = round.best_effort;
      row.seconds = elapsed(start);
      trace.rows.push_back(std::move(row));
    }

    trace.stop = StopReason::NoCandidates;
    for (std::size_t iter = 1; !round.selected.empty(); ++iter) {
      if (iter > config_.max_iterations) {
        trace.stop = StopReason::IterationCap;
        trace.warning = true;
        break;
      }
      TraceRow row;
      row.iteration = iter;
      for (const auto& c : round.selected) {
        active_.insert(c.itemset);
        features_.push_back(c.itemset);
        columns_.push_back(feature_column(db_, c.itemset));
        weights_.push_back(0.0);
        row.added.push_back(c);
      }

      auto solved = optimize_columns(columns_, db_.labels, config_.loss, config_.C, weights_, config_.solver);
      weights_ = std::move(solved.weights);
      scores_ = std::move(solved.scores);

      round = mine();
      double v = candidate_term(round.mined);
      for (const double r : solved.residuals) v += r;

      row.active = features_.size();
      row.suboptimality = v;
      row.objective = solved.objective;
      row.mined = round.mined.size();
      row.exponent = round.exponent;
      row.best_effort = round.best_effort;
      row.solver_converged = solved.converged;
      row.seconds = elapsed(start);
      trace.rows.push_back(std::move(row));

      if (v < config_.epsilon * trace.initial_suboptimality) {
        trace.stop = StopReason::Suboptimality;
        break;
      }
    }

    SparseModel model(db_.d, config_.k, config_.loss, config_.C);
    for (std::size_t j = 0; j < features_.size(); ++j) model.set_weight(features_[j], weights_[j]);
    return {std::move(model), std::move(trace)};
  }

 private:
  static double elapsed(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
  }

  TopKResult mine() {
    auto weighting = transaction_weights(config_.loss, scores_, db_.labels, config_.C);
    const auto exclude = [this](const Itemset& p) { return active_.contains(p); };
    if (config_.loss == LossKind::L2Hinge && config_.prune_zero_rows && !weighting.zero_rows.empty()) {
      std::vector<std::size_t> keep;
      std::vector<double> alpha;
      std::size_t z = 0;
      for (std::size_t i = 0; i < db_.size(); ++i) {
        if (z < weighting.zero_rows.size() && weighting.zero_rows[z] == i) {
          ++z;
          continue;
        }
        keep.push_back(i);
        alpha.push_back(weighting.alpha[i]);
      }
      const auto pruned = db_.subset(keep);
      return miner_.select(pruned, alpha, exclude);
    }
    return miner_.select(db_, weighting.alpha, exclude);
  }

  const TransactionDatabase& db_;
  const GrabConfig& config_;
  std::vector<double> scores_;
  TopKMiner miner_;
  std::set<Itemset> active_;
  std::vector<Itemset> features_;
  std::vector<FeatureColumn> columns_;
  std::vector<double> weights_;
};

}  // namespace

void GrabConfig::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw ContractError("C must be positive and finite");
  if (batch_size < 1) throw ContractError("batch size must be at least 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ContractError("epsilon must lie in (0, 1)");
  if (max_iterations < 1) throw ContractError("max iterations must be at least 1");
  if (initial_exponent < 0) throw ContractError("initial threshold exponent must be >= 0");
  if (!(solver.tolerance > 0.0)) throw ContractError("solver tolerance must be positive");
  if (solver.max_sweeps < 1) throw ContractError("solver needs at least one sweep");
}

TrainResult train(const TransactionDatabase& db, const GrabConfig& config) {
  config.validate();
  if (db.empty()) throw ContractError("cannot train on an empty database");
  db.validate();
  return Trainer(db, config).run();
}

double suboptimality(std::span<const double> active_residuals, std::span<const MinedCandidate> mined) {
  double v = candidate_term(mined);
  for (const double r : active_residuals) v += r;
  return v;
}

double suboptimality(const TransactionDatabase& db, const GrabConfig& config,
                     const SparseModel& model, std::span<const MinedCandidate> mined) {
  const auto residuals = active_residual(db, config.loss, config.C, model);
  std::vector<MinedCandidate> inactive;
  for (const auto& c : mined) {
    if (!model.weights().contains(c.itemset)) inactive.push_back(c);
  }
  return suboptimality(residuals, inactive);
}

double objective_value(const SparseModel& model, const TransactionDatabase& db, LossKind loss,
                       double C) {
  std::vector<double> scores(db.size());
  for (std::size_t i = 0; i < db.size(); ++i) scores[i] = predict_score(model, db.transactions[i]);
  std::vector<double> weights;
  for (const auto& [p, w] : model.weights()) weights.push_back(w);
  return objective_value(loss, C, scores, db.labels, weights);
}

}  // namespace grab
