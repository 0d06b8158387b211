#include <doctest.h>

#include <algorithm>
#include <array>
#include <random>

#include "grab/error.hpp"
#include "grab/oracle.hpp"
#include "grab/solver.hpp"
#include "random_instances.hpp"

using namespace grab;

namespace {

std::vector<Itemset> pick_features(std::mt19937_64& rng, const TransactionDatabase& db, std::size_t n) {
  auto all = oracle::enumerate_occurring_itemsets(db, DegreeCap{2});
  std::shuffle(all.begin(), all.end(), rng);
  // Distinct columns keep the optimum unique.
  std::vector<Itemset> out;
  std::vector<FeatureColumn> seen;
  for (const auto& p : all) {
    auto col = feature_column(db, p);
    if (std::find(seen.begin(), seen.end(), col) != seen.end()) continue;
    seen.push_back(std::move(col));
    out.push_back(p);
    if (out.size() == n) break;
  }
  return out;
}

}  // namespace

TEST_CASE("bias-only logistic problem with balanced labels stays at zero") {
  TransactionDatabase db;
  db.d = 1;
  db.transactions = {{}, {1}, {1}, {}};
  db.labels = {1, -1, 1, -1};
  const auto r = optimize_active(ActiveProblem{db, LossKind::Logistic, 1.0, {{}}, {}, {}});
  CHECK(r.weights == std::vector<double>{0.0});
  CHECK(r.converged);
  CHECK(r.sweeps == 0);
}

TEST_CASE("one-example squared hinge has its minimum at w = 0.5") {
  TransactionDatabase db;
  db.d = 1;
  db.transactions = {{}};
  db.labels = {1};
  const auto r = optimize_active(ActiveProblem{db, LossKind::L2Hinge, 1.0, {{}}, {}, {}});
  CHECK(r.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.objective == doctest::Approx(0.75));
  CHECK(r.max_residual <= 1e-12);
}

TEST_CASE("coordinate residual formula") {
  CHECK(coordinate_residual(0.5, 0.0) == 0.0);
  CHECK(coordinate_residual(-0.5, 0.0) == 0.0);
  CHECK(coordinate_residual(1.7, 0.0) == doctest::Approx(0.7));
  CHECK(coordinate_residual(-1.7, 0.0) == doctest::Approx(0.7));
  CHECK(coordinate_residual(-1.0, 2.0) == 0.0);
  CHECK(coordinate_residual(0.25, -2.0) == doctest::Approx(0.75));
}

TEST_CASE("solver contracts") {
  const auto db = testing::xor_database();
  CHECK_THROWS_AS(optimize_active(ActiveProblem{db, LossKind::Logistic, 1.0, {{1}, {1}}, {}, {}}), ContractError);
  CHECK_THROWS_AS(optimize_active(ActiveProblem{db, LossKind::Logistic, 1.0, {{3}}, {}, {}}), ContractError);
  CHECK_THROWS_AS(optimize_active(ActiveProblem{db, LossKind::Logistic, 1.0, {{1}}, {1.0, 2.0}, {}}), ContractError);
  CHECK_THROWS_AS(optimize_active(ActiveProblem{db, LossKind::Logistic, 0.0, {{1}}, {}, {}}), ContractError);
}

TEST_CASE("solver never increases the objective from its warm start") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const auto db = testing::random_database(rng, 30, 6, 0.5);
    const auto features = pick_features(rng, db, 6);
    const auto warm = testing::random_weights(rng, features.size(), -1.5, 1.5);
    const auto kind = trial % 2 ? LossKind::L2Hinge : LossKind::Logistic;
    const double C = std::array{0.1, 1.0, 10.0}[trial % 3];
    std::vector<FeatureColumn> cols;
    for (const auto& p : features) cols.push_back(feature_column(db, p));
    std::vector<double> start_scores(db.size(), 0.0);
    for (std::size_t j = 0; j < cols.size(); ++j)
      for (const auto r : cols[j]) start_scores[r] += warm[j];
    const double start = objective_value(kind, C, start_scores, db.labels, warm);
    const auto r = optimize_active(ActiveProblem{db, kind, C, features, warm, {}});
    CHECK(r.objective <= start + 1e-12);
    CHECK(r.converged);
  }
}

TEST_CASE("solver agrees with the proximal-gradient reference") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    const auto db = testing::random_database(rng, 25, 5, 0.5);
    const auto features = pick_features(rng, db, 1 + trial % 5);
    const auto kind = trial % 2 ? LossKind::L2Hinge : LossKind::Logistic;
    const double C = std::array{0.1, 1.0, 10.0}[trial % 3];
    const auto cd = optimize_active(ActiveProblem{db, kind, C, features, {}, {1e-10, 100000}});
    const auto ref = oracle::reference_minimize(db, features, kind, C);
    CHECK(cd.objective == doctest::Approx(ref.objective).epsilon(1e-6));
  }
}

TEST_CASE("solution does not depend on feature order") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto db = testing::random_database(rng, 30, 6, 0.5);
    auto features = pick_features(rng, db, 5);
    const auto kind = trial % 2 ? LossKind::L2Hinge : LossKind::Logistic;
    const SolverOptions tight{1e-12, 100000};
    const auto a = optimize_active(ActiveProblem{db, kind, 2.0, features, {}, tight});
    std::vector<std::size_t> perm(features.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Itemset> permuted;
    for (const auto i : perm) permuted.push_back(features[i]);
    const auto b = optimize_active(ActiveProblem{db, kind, 2.0, permuted, {}, tight});
    for (std::size_t i = 0; i < perm.size(); ++i) {
      CHECK(b.weights[i] == doctest::Approx(a.weights[perm[i]]).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("warm start at the optimum exits without a sweep") {
  std::mt19937_64 rng(24);
  const auto db = testing::random_database(rng, 40, 6, 0.5);
  const auto features = pick_features(rng, db, 5);
  for (const auto kind : {LossKind::Logistic, LossKind::L2Hinge}) {
    const auto first = optimize_active(ActiveProblem{db, kind, 1.0, features, {}, {}});
    REQUIRE(first.converged);
    const auto again = optimize_active(ActiveProblem{db, kind, 1.0, features, first.weights, {}});
    CHECK(again.sweeps == 0);
    CHECK(again.weights == first.weights);
  }
}

TEST_CASE("active_residual vanishes at a solved model") {
  std::mt19937_64 rng(25);
  const auto db = testing::random_database(rng, 40, 6, 0.5);
  const auto features = pick_features(rng, db, 4);
  const auto r = optimize_active(ActiveProblem{db, LossKind::Logistic, 1.0, features, {}, {1e-9, 10000}});
  SparseModel model(db.d, {});
  for (std::size_t j = 0; j < features.size(); ++j) model.set_weight(features[j], r.weights[j]);
  for (const double v : active_residual(db, LossKind::Logistic, 1.0, model)) CHECK(v <= 1e-8);
}
