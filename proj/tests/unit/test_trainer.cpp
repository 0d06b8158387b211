#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "grab/error.hpp"
#include "grab/oracle.hpp"
#include "grab/trainer.hpp"
#include "random_instances.hpp"

using namespace grab;

namespace {

void check_trace_invariants(const TrainResult& r, const GrabConfig& config) {
  const auto& rows = r.trace.rows;
  REQUIRE_FALSE(rows.empty());
  CHECK(rows.front().iteration == 0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].active >= rows[i - 1].active);
    CHECK(rows[i].objective <= rows[i - 1].objective + 1e-10);
    for (const auto& c : rows[i].added) CHECK(std::abs(c.weighted_frequency) > 1.0);
    CHECK(rows[i].added.size() <= config.batch_size);
  }
  const auto& last = rows.back();
  if (r.trace.stop == StopReason::Suboptimality) {
    CHECK(last.suboptimality < config.epsilon * r.trace.initial_suboptimality);
  } else {
    CHECK(r.trace.stop == StopReason::NoCandidates);
    CHECK(last.mined == 0);
  }
  for (const auto& [p, w] : r.model.weights()) {
    CHECK(w != 0.0);
    CHECK(config.k.allows(p.size()));
  }
}

}  // namespace

TEST_CASE("tiny C leaves the model empty and stops at iteration 0") {
  std::mt19937_64 rng(41);
  const auto db = testing::random_database(rng, 30, 6);
  GrabConfig config;
  config.C = 1e-9;
  const auto r = train(db, config);
  CHECK(r.model.empty());
  REQUIRE(r.trace.rows.size() == 1);
  CHECK(r.trace.rows[0].iteration == 0);
  CHECK(r.trace.initial_suboptimality == 0.0);
  CHECK(r.trace.stop == StopReason::NoCandidates);
}

TEST_CASE("XOR needs conjunctions of degree two") {
  const auto db = testing::xor_database();
  GrabConfig config;
  config.C = 100;
  for (const auto loss : {LossKind::Logistic, LossKind::L2Hinge}) {
    config.loss = loss;
    config.k = DegreeCap{2};
    const auto two = train(db, config);
    CHECK(accuracy(two.model, db) == 1.0);
    check_trace_invariants(two, config);
    config.k = DegreeCap{1};
    const auto one = train(db, config);
    CHECK(accuracy(one.model, db) <= 0.75);
    check_trace_invariants(one, config);
  }
}

TEST_CASE("GRAB reaches the full-expansion optimum on small instances") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 12; ++trial) {
    const auto db = testing::random_database(rng, 10 + trial * 3, 3 + trial % 5, 0.4);
    GrabConfig config;
    config.C = std::array{0.1, 1.0, 10.0}[trial % 3];
    config.loss = trial % 2 ? LossKind::L2Hinge : LossKind::Logistic;
    config.k = DegreeCap{1 + static_cast<std::size_t>(trial % 2)};
    config.batch_size = 1 + trial % 4;
    const auto r = train(db, config);
    check_trace_invariants(r, config);
    const auto best = oracle::expand_and_solve(db, config.loss, config.C, config.k);
    const double g = objective_value(r.model, db, config.loss, config.C);
    CHECK(g <= best.solve.objective * 1.01);
    CHECK(g >= best.solve.objective * (1 - 1e-9));
  }
}

TEST_CASE("batch size 1 adds the grafting argmax first") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const auto db = testing::random_database(rng, 25, 6, 0.5);
    GrabConfig config;
    config.C = 2.0;
    config.k = DegreeCap{3};
    config.batch_size = 1;
    const auto r = train(db, config);
    const std::vector<double> alpha = transaction_weights(config.loss, SparseModel(db.d, {}), db, config.C).alpha;
    const auto best = oracle::brute_force_argmax(db, alpha, config.k);
    REQUIRE(r.trace.rows.size() >= 2);
    REQUIRE(r.trace.rows[1].added.size() == 1);
    CHECK(r.trace.rows[1].added[0].itemset == best.itemset);
  }
}

TEST_CASE("suboptimality arithmetic") {
  const std::vector<MinedCandidate> one{{{1}, -3.0}};
  CHECK(suboptimality(std::vector<double>{}, one) == 2.0);
  CHECK(suboptimality(std::vector<double>{}, std::vector<MinedCandidate>{}) == 0.0);
  CHECK(suboptimality(std::vector<double>{0.25, 0.5}, one) == 2.75);

  const auto db = testing::xor_database();
  GrabConfig config;
  SparseModel model(2, {});
  model.set_weight({1}, 0.5);
  const std::vector<MinedCandidate> mined{{{1}, 4.0}, {{2}, 1.5}};
  const auto residuals = active_residual(db, config.loss, config.C, model);
  CHECK(suboptimality(db, config, model, mined) == doctest::Approx(residuals[0] + 0.5));
}

TEST_CASE("converged run has small suboptimality") {
  std::mt19937_64 rng(44);
  const auto db = testing::random_database(rng, 40, 6, 0.5);
  GrabConfig config;
  config.C = 1.0;
  config.k = DegreeCap{2};
  config.epsilon = 1e-6;
  config.solver.tolerance = 1e-9;
  const auto r = train(db, config);
  if (r.trace.stop == StopReason::NoCandidates) {
    CHECK(r.trace.rows.back().suboptimality <= config.solver.tolerance * r.trace.rows.back().active + 1e-15);
  }
  CHECK(r.trace.stop != StopReason::IterationCap);
}

TEST_CASE("iteration cap sets the warning flag") {
  std::mt19937_64 rng(45);
  const auto db = testing::random_database(rng, 40, 6, 0.5);
  GrabConfig config;
  config.C = 10.0;
  config.batch_size = 1;
  config.max_iterations = 1;
  const auto r = train(db, config);
  CHECK(r.trace.stop == StopReason::IterationCap);
  CHECK(r.trace.warning);
}

TEST_CASE("configuration validation") {
  const auto db = testing::xor_database();
  GrabConfig bad;
  bad.epsilon = 1.0;
  CHECK_THROWS_AS(train(db, bad), ContractError);
  bad = {};
  bad.C = -1;
  CHECK_THROWS_AS(train(db, bad), ContractError);
  bad = {};
  bad.batch_size = 0;
  CHECK_THROWS_AS(train(db, bad), ContractError);
  CHECK_THROWS_AS(train(TransactionDatabase{}, GrabConfig{}), ContractError);
}

TEST_CASE("hinge row pruning does not change the trained model") {
  std::mt19937_64 rng(46);
  for (int trial = 0; trial < 5; ++trial) {
    const auto db = testing::random_database(rng, 40, 7, 0.5);
    GrabConfig config;
    config.loss = LossKind::L2Hinge;
    config.C = 1.0;
    config.k = DegreeCap{3};
    const auto pruned = train(db, config);
    config.prune_zero_rows = false;
    const auto full = train(db, config);
    CHECK(pruned.model == full.model);
  }
}
