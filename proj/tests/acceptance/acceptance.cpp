#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "grab/miner.hpp"
#include "grab/model.hpp"
#include "grab/oracle.hpp"
#include "grab/trainer.hpp"
#include "random_instances.hpp"

using namespace grab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(std::string why) {
    if (pass) detail = std::move(why);
    pass = false;
  }
};

struct Instance {
  TransactionDatabase db;
  std::vector<double> alpha;
  DegreeCap cap;
  double theta = 1.0;
};

std::vector<Instance> mining_instances() {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> m_dist(1, 20), d_dist(1, 10);
  std::uniform_real_distribution<double> density(0.1, 0.8);
  const std::array<DegreeCap, 4> caps{DegreeCap{1}, DegreeCap{2}, DegreeCap{3}, DegreeCap{}};
  const std::array<double, 3> thetas{0.5, 1.0, 2.0};
  std::vector<Instance> out;
  for (std::size_t i = 0; i < 240; ++i) {
    Instance inst;
    inst.db = testing::random_database(rng, m_dist(rng), d_dist(rng), density(rng));
    inst.alpha = testing::random_weights(rng, inst.db.size(), -3.0, 3.0);
    inst.cap = caps[i % caps.size()];
    inst.theta = thetas[(i / caps.size()) % thetas.size()];
    out.push_back(std::move(inst));
  }
  return out;
}

Outcome miner_exactness() {
  Outcome o;
  std::size_t index = 0;
  for (const auto& inst : mining_instances()) {
    auto mined = mine_signed(inst.db, inst.alpha, inst.theta, inst.cap).candidates;
    const auto expected = oracle::brute_force_candidates(inst.db, inst.alpha, inst.theta, inst.cap);
    std::sort(mined.begin(), mined.end(), [](const auto& a, const auto& b) { return a.itemset < b.itemset; });
    if (mined.size() != expected.size()) {
      o.fail(fmt::format("instance {}: {} itemsets, expected {}", index, mined.size(), expected.size()));
    } else {
      for (std::size_t j = 0; j < mined.size(); ++j) {
        if (mined[j].itemset != expected[j].itemset) {
          o.fail(fmt::format("instance {}: itemset sets differ", index));
          break;
        }
        if (std::abs(mined[j].weighted_frequency - expected[j].weighted_frequency) > 1e-12) {
          o.fail(fmt::format("instance {}: weighted frequency off by {:.3g}", index,
                             std::abs(mined[j].weighted_frequency - expected[j].weighted_frequency)));
          break;
        }
      }
    }
    ++index;
  }
  if (o.pass) o.detail = fmt::format("{} instances", index);
  return o;
}

Outcome gradient_check() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> score(-6.0, 6.0);
  const double h = 1e-6;
  double worst = 0.0;
  for (const auto kind : {LossKind::Logistic, LossKind::L2Hinge}) {
    int checked = 0;
    while (checked < 1000) {
      const double f = score(rng);
      const int y = (checked % 2) ? 1 : -1;
      if (kind == LossKind::L2Hinge && std::abs(1.0 - y * f) < 1e-4) continue;
      const double fd = (loss_value(kind, f + h, y) - loss_value(kind, f - h, y)) / (2 * h);
      const double g = loss_grad(kind, f, y);
      const double scale = std::max({std::abs(g), std::abs(fd), 1e-8});
      const double rel = std::abs(fd - g) / scale;
      worst = std::max(worst, rel);
      if (rel >= 1e-6) o.fail(fmt::format("{} at f={} y={}: relative error {:.3g}", to_string(kind), f, y, rel));
      ++checked;
    }
  }
  if (o.pass) o.detail = fmt::format("2000 points, worst relative error {:.2g}", worst);
  return o;
}

std::vector<std::pair<TrainResult, GrabConfig>> recorded_runs;

bool check_stopping(const TrainResult& r, const GrabConfig& config, Outcome& o, const std::string& tag) {
  const auto& rows = r.trace.rows;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].objective > rows[i - 1].objective + 1e-10) {
      o.fail(fmt::format("{}: objective rose at iteration {}", tag, rows[i].iteration));
      return false;
    }
  }
  const auto& last = rows.back();
  const bool empty = r.trace.stop == StopReason::NoCandidates && last.mined == 0;
  const bool small = r.trace.stop == StopReason::Suboptimality &&
                     last.suboptimality < config.epsilon * r.trace.initial_suboptimality;
  if (!empty && !small) {
    o.fail(fmt::format("{}: stopped without meeting a stopping condition", tag));
    return false;
  }
  return true;
}

Outcome grab_matches_expansion() {
  Outcome o;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> m_dist(10, 50), d_dist(2, 8);
  const std::array<double, 3> Cs{0.1, 1.0, 10.0};
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto db = testing::random_database(rng, m_dist(rng), d_dist(rng), 0.4);
    GrabConfig config;
    config.C = Cs[i % 3];
    config.loss = i % 2 ? LossKind::L2Hinge : LossKind::Logistic;
    config.k = DegreeCap{1 + static_cast<std::size_t>(i / 2 % 2)};
    const auto r = train(db, config);
    recorded_runs.emplace_back(r, config);
    const auto best = oracle::expand_and_solve(db, config.loss, config.C, config.k);
    const double g = objective_value(r.model, db, config.loss, config.C);
    const double rel = (g - best.solve.objective) / std::max(std::abs(best.solve.objective), 1e-12);
    worst = std::max(worst, rel);
    if (rel > 0.01) o.fail(fmt::format("instance {}: objective {} vs optimum {}", i, g, best.solve.objective));
  }
  if (o.pass) o.detail = fmt::format("20 instances, worst relative gap {:.2g}", worst);
  return o;
}

Outcome xor_separation() {
  Outcome o;
  const auto db = testing::xor_database();
  GrabConfig config;
  config.C = 100;
  config.k = DegreeCap{2};
  const auto r2 = train(db, config);
  recorded_runs.emplace_back(r2, config);
  const double two = accuracy(r2.model, db);
  config.k = DegreeCap{1};
  const auto r1 = train(db, config);
  recorded_runs.emplace_back(r1, config);
  const double one = accuracy(r1.model, db);
  if (two != 1.0) o.fail(fmt::format("k=2 accuracy {}", two));
  if (one > 0.75) o.fail(fmt::format("k=1 accuracy {}", one));
  if (o.pass) o.detail = fmt::format("k=2 accuracy {}, k=1 accuracy {}", two, one);
  return o;
}

Outcome mobius_exactness() {
  Outcome o;
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<std::size_t> d_dist(1, 4);
  std::uniform_real_distribution<double> target(-5.0, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t d = d_dist(rng);
    std::vector<Transaction> points;
    std::vector<double> targets;
    std::bernoulli_distribution keep(0.7);
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
      if (!keep(rng)) continue;
      Transaction t;
      for (std::size_t a = 0; a < d; ++a) {
        if (mask >> a & 1u) t.push_back(static_cast<Item>(a + 1));
      }
      points.push_back(std::move(t));
      targets.push_back(target(rng));
    }
    const auto model = oracle::mobius_interpolation(points, targets, d);
    for (std::size_t j = 0; j < points.size(); ++j) {
      const double err = std::abs(predict_score(model, points[j]) - targets[j]);
      worst = std::max(worst, err);
      if (err > 1e-9) o.fail(fmt::format("instance {}: error {:.3g}", i, err));
    }
  }
  if (o.pass) o.detail = fmt::format("50 instances, worst error {:.2g}", worst);
  return o;
}

Outcome stopping_soundness() {
  Outcome o;
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> m_dist(10, 80), d_dist(2, 10);
  const std::array<double, 4> Cs{0.01, 0.3, 3.0, 30.0};
  int runs = 0;
  for (const auto& [r, config] : recorded_runs) {
    check_stopping(r, config, o, fmt::format("recorded run {}", runs));
    ++runs;
  }
  for (int i = 0; i < 40; ++i) {
    const auto db = testing::random_database(rng, m_dist(rng), d_dist(rng), 0.4);
    GrabConfig config;
    config.C = Cs[i % 4];
    config.loss = i % 2 ? LossKind::L2Hinge : LossKind::Logistic;
    config.k = DegreeCap{1 + static_cast<std::size_t>(i % 3)};
    config.batch_size = 1 + static_cast<std::size_t>(i % 5);
    const auto r = train(db, config);
    check_stopping(r, config, o, fmt::format("run {}", i));
    ++runs;
  }
  if (o.pass) o.detail = fmt::format("{} runs", runs);
  return o;
}

Outcome hinge_pruning_neutrality() {
  Outcome o;
  std::mt19937_64 rng(19);
  std::normal_distribution<double> weight(0.0, 1.0);
  std::size_t index = 0, pruned_rows = 0;
  for (const auto& inst : mining_instances()) {
    const auto& db = inst.db;
    SparseModel model(db.d, inst.cap, LossKind::L2Hinge, 1.0);
    model.set_weight({}, weight(rng));
    for (Item a = 1; a <= db.d; ++a) model.set_weight({a}, weight(rng));
    const auto w = transaction_weights(LossKind::L2Hinge, model, db, 2.0);
    std::vector<std::size_t> kept;
    std::vector<double> kept_alpha;
    for (std::size_t i = 0; i < db.size(); ++i) {
      if (std::find(w.zero_rows.begin(), w.zero_rows.end(), i) == w.zero_rows.end()) {
        kept.push_back(i);
        kept_alpha.push_back(w.alpha[i]);
      }
    }
    pruned_rows += w.zero_rows.size();
    const auto reduced = db.subset(kept);
    TopKOptions options;
    options.k = 5;
    options.depth_cap = inst.cap;
    const auto full = TopKMiner(options).select(db, w.alpha);
    const auto cut = TopKMiner(options).select(reduced, kept_alpha);
    auto same = [](const std::vector<MinedCandidate>& a, const std::vector<MinedCandidate>& b) {
      if (a.size() != b.size()) return false;
      for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j].itemset != b[j].itemset ||
            std::bit_cast<std::uint64_t>(a[j].weighted_frequency) !=
                std::bit_cast<std::uint64_t>(b[j].weighted_frequency)) {
          return false;
        }
      }
      return true;
    };
    if (!same(full.selected, cut.selected) || full.exponent != cut.exponent) {
      o.fail(fmt::format("instance {}: batches differ", index));
    }
    ++index;
  }
  if (o.pass) o.detail = fmt::format("{} instances, {} rows pruned", index, pruned_rows);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double time_limit;
  };
  const std::vector<Criterion> criteria{
      {1, "miner exactness", miner_exactness, 10.0},
      {2, "loss gradients", gradient_check, 1.0},
      {3, "GRAB matches full expansion", grab_matches_expansion, 60.0},
      {4, "XOR separation", xor_separation, 1.0},
      {5, "Mobius exactness", mobius_exactness, 1.0},
      {6, "stopping soundness", stopping_soundness, 60.0},
      {7, "hinge pruning neutrality", hinge_pruning_neutrality, 10.0},
  };
  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    auto outcome = c.run();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.time_limit) outcome.fail(fmt::format("took {:.2f}s, limit {}s", seconds, c.time_limit));
    all = all && outcome.pass;
    fmt::print("[{}] {}. {}: {} ({:.2f}s)\n", outcome.pass ? "PASS" : "FAIL", c.id, c.name, outcome.detail,
               seconds);
  }
  fmt::print("[SKIP] 8. a1a benchmark: optional, run the a1a_benchmark test with GRAB_A1A_DIR set\n");
  return all ? 0 : 1;
}
