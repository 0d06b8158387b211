#include "grab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "grab/error.hpp"

namespace grab::oracle {

namespace {

double direct_weighted_frequency(const TransactionDatabase& db, std::span<const double> alpha,
                                 const Itemset& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < db.size(); ++i) {
    const auto& t = db.transactions[i];
    bool inside = true;
    for (const auto item : p) {
      if (std::find(t.begin(), t.end(), item) == t.end()) {
        inside = false;
        break;
      }
    }
    if (inside) s += alpha[i];
  }
  return s;
}

// Explicit 0/1 design matrix, row-major.
struct Design {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> x;

  double at(std::size_t i, std::size_t j) const { return x[i * cols + j]; }
};

Design build_design(const TransactionDatabase& db, std::span<const Itemset> features) {
  Design design{db.size(), features.size(), std::vector<double>(db.size() * features.size(), 0.0)};
  for (std::size_t i = 0; i < db.size(); ++i) {
    const std::set<Item> t(db.transactions[i].begin(), db.transactions[i].end());
    for (std::size_t j = 0; j < features.size(); ++j) {
      const bool on = std::all_of(features[j].begin(), features[j].end(),
                                  [&](Item item) { return t.contains(item); });
      design.x[i * design.cols + j] = on ? 1.0 : 0.0;
    }
  }
  return design;
}

std::vector<double> design_scores(const Design& design, std::span<const double> w) {
  std::vector<double> f(design.rows, 0.0);
  for (std::size_t i = 0; i < design.rows; ++i) {
    for (std::size_t j = 0; j < design.cols; ++j) f[i] += design.at(i, j) * w[j];
  }
  return f;
}

double smooth_part(const Design& design, std::span<const int> labels, LossKind loss, double C,
                   std::span<const double> w) {
  const auto f = design_scores(design, w);
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) total += loss_value(loss, f[i], labels[i]);
  return C * total;
}

std::vector<double> smooth_gradient(const Design& design, std::span<const int> labels, LossKind loss,
                                    double C, std::span<const double> w) {
  const auto f = design_scores(design, w);
  std::vector<double> g(design.cols, 0.0);
  for (std::size_t i = 0; i < design.rows; ++i) {
    const double d = C * loss_grad(loss, f[i], labels[i]);
    for (std::size_t j = 0; j < design.cols; ++j) g[j] += design.at(i, j) * d;
  }
  return g;
}

double l1(std::span<const double> w) {
  double s = 0.0;
  for (const double v : w) s += std::abs(v);
  return s;
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

std::vector<Itemset> enumerate_occurring_itemsets(const TransactionDatabase& db, DegreeCap depth_cap,
                                                  std::size_t max_count) {
  std::set<Itemset> seen;
  for (const auto& t : db.transactions) {
    if (t.size() >= 63) throw SizeError("transaction too long to enumerate its subsets");
    const std::uint64_t subsets = std::uint64_t{1} << t.size();
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
      Itemset p;
      for (std::size_t b = 0; b < t.size(); ++b) {
        if (mask & (std::uint64_t{1} << b)) p.push_back(t[b]);
      }
      if (!depth_cap.allows(p.size())) continue;
      seen.insert(std::move(p));
      if (seen.size() > max_count) {
        throw SizeError(fmt::format("more than {} occurring itemsets", max_count));
      }
    }
  }
  return {seen.begin(), seen.end()};
}

std::vector<MinedCandidate> brute_force_candidates(const TransactionDatabase& db,
                                                   std::span<const double> alpha, double theta,
                                                   DegreeCap depth_cap, std::size_t max_count) {
  if (alpha.size() != db.size()) throw ContractError("weight count differs from transaction count");
  std::vector<MinedCandidate> out;
  for (auto& p : enumerate_occurring_itemsets(db, depth_cap, max_count)) {
    const double wf = direct_weighted_frequency(db, alpha, p);
    if (std::abs(wf) > theta) out.push_back({std::move(p), wf});
  }
  return out;
}

MinedCandidate brute_force_argmax(const TransactionDatabase& db, std::span<const double> alpha,
                                  DegreeCap depth_cap) {
  MinedCandidate best;
  bool have = false;
  for (auto& p : enumerate_occurring_itemsets(db, depth_cap)) {
    MinedCandidate c{std::move(p), 0.0};
    c.weighted_frequency = direct_weighted_frequency(db, alpha, c.itemset);
    if (!have || candidate_rank_less(c, best)) {
      best = std::move(c);
      have = true;
    }
  }
  return best;
}

ExpansionSolution expand_and_solve(const TransactionDatabase& db, LossKind loss, double C,
                                   DegreeCap depth_cap, SolverOptions options,
                                   std::size_t max_features) {
  ExpansionSolution out;
  out.features = enumerate_occurring_itemsets(db, depth_cap, max_features);
  out.solve = optimize_active(ActiveProblem{db, loss, C, out.features, {}, options});
  out.model = SparseModel(db.d, depth_cap, loss, C);
  for (std::size_t j = 0; j < out.features.size(); ++j) {
    out.model.set_weight(out.features[j], out.solve.weights[j]);
  }
  return out;
}

ReferenceSolution reference_minimize(const TransactionDatabase& db, std::span<const Itemset> features,
                                     LossKind loss, double C, std::size_t max_iterations,
                                     double tolerance) {
  const auto design = build_design(db, features);
  const auto& labels = db.labels;
  const std::size_t n = features.size();

  std::vector<double> w(n, 0.0), prev(n, 0.0), y(n, 0.0);
  double step = 1.0;
  double momentum = 1.0;
  double objective = smooth_part(design, labels, loss, C, w) + l1(w);
  ReferenceSolution out;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    const auto g = smooth_gradient(design, labels, loss, C, y);
    const double fy = smooth_part(design, labels, loss, C, y);
    std::vector<double> next(n);
    // Backtrack until the quadratic model majorises the smooth part.
    while (true) {
      double model_gap = 0.0;
      double dist2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        next[j] = soft_threshold(y[j] - step * g[j], step);
        const double d = next[j] - y[j];
        model_gap += g[j] * d;
        dist2 += d * d;
      }
      if (smooth_part(design, labels, loss, C, next) <= fy + model_gap + dist2 / (2.0 * step) + 1e-15) break;
      step *= 0.5;
    }
    const double next_objective = smooth_part(design, labels, loss, C, next) + l1(next);
    prev = w;
    w = next;
    out.iterations = it + 1;
    if (next_objective > objective) {
      // Adaptive restart: drop momentum when the objective goes up.
      momentum = 1.0;
      y = w;
      objective = next_objective;
      continue;
    }
    const double improvement = objective - next_objective;
    objective = next_objective;
    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    for (std::size_t j = 0; j < n; ++j) {
      y[j] = w[j] + (momentum - 1.0) / next_momentum * (w[j] - prev[j]);
    }
    momentum = next_momentum;
    step *= 1.5;
    if (improvement <= tolerance * std::max(1.0, std::abs(objective)) && it > 10) {
      // Confirm with a plain proximal step before stopping.
      double change = 0.0;
      const auto gw = smooth_gradient(design, labels, loss, C, w);
      for (std::size_t j = 0; j < n; ++j) {
        change = std::max(change, std::abs(soft_threshold(w[j] - step * gw[j], step) - w[j]) / step);
      }
      if (change < 1e-9) break;
    }
  }
  out.weights = w;
  out.objective = smooth_part(design, labels, loss, C, w) + l1(w);
  return out;
}

SparseModel mobius_interpolation(std::span<const Transaction> points, std::span<const double> targets,
                                 std::size_t d) {
  if (points.size() != targets.size()) throw ContractError("points and targets differ in length");
  if (d > 20) throw SizeError("Möbius interpolation enumerates 2^d supports; d must be <= 20");
  const std::size_t cube = std::size_t{1} << d;
  std::vector<double> g(cube, 0.0);
  std::vector<bool> seen(cube, false);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!is_valid_itemset(points[i], d)) throw ContractError("interpolation point outside [1, d]");
    std::size_t mask = 0;
    for (const auto item : points[i]) mask |= std::size_t{1} << (item - 1);
    if (seen[mask] && g[mask] != targets[i]) {
      throw ConsistencyError(fmt::format("support {{{}}} has conflicting targets", format_itemset(points[i])));
    }
    seen[mask] = true;
    g[mask] = targets[i];
  }

  SparseModel model(d, DegreeCap{std::max<std::size_t>(d, 1)});
  for (std::size_t p = 0; p < cube; ++p) {
    // Sum over all submasks q of p.
    double w = 0.0;
    for (std::size_t q = p;; q = (q - 1) & p) {
      const int parity = __builtin_popcountll(p & ~q) & 1;
      w += parity ? -g[q] : g[q];
      if (q == 0) break;
    }
    if (w == 0.0) continue;
    Itemset items;
    for (std::size_t b = 0; b < d; ++b) {
      if (p & (std::size_t{1} << b)) items.push_back(static_cast<Item>(b + 1));
    }
    model.set_weight(items, w);
  }
  return model;
}

}  // namespace grab::oracle
