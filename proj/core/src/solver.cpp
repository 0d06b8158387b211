#include "grab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "grab/error.hpp"
#include "grab/model.hpp"

namespace grab {

namespace {

constexpr double kArmijo = 0.01;
constexpr int kMaxLineSearch = 40;
constexpr double kMinCurvature = 1e-12;
constexpr std::size_t kMaxNewtonSize = 500;
constexpr int kMaxNewtonHalvings = 30;

double sign_of(double w) { return w > 0.0 ? 1.0 : (w < 0.0 ? -1.0 : 0.0); }

class CoordinateDescent {
 public:
  CoordinateDescent(std::span<const FeatureColumn> columns, std::span<const int> labels,
                    LossKind loss, double C, std::span<const double> warm_start)
      : columns_(columns), labels_(labels), loss_(loss), C_(C),
        weights_(warm_start.begin(), warm_start.end()), scores_(labels.size(), 0.0) {
    if (weights_.empty()) weights_.assign(columns.size(), 0.0);
    if (weights_.size() != columns.size()) {
      throw ContractError(fmt::format("warm start has {} weights for {} features", weights_.size(),
                                      columns.size()));
    }
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (!std::isfinite(weights_[j])) throw ContractError("warm start weights must be finite");
      if (weights_[j] == 0.0) continue;
      for (const auto r : columns[j]) scores_.at(r) += weights_[j];
    }
  }

  SolveResult run(const SolverOptions& options) {
    SolveResult out;
    double worst = refresh_residuals(out.residuals);
    while (worst > options.tolerance && out.sweeps < options.max_sweeps) {
      for (std::size_t j = 0; j < columns_.size(); ++j) {
        if (loss_ == LossKind::L2Hinge) {
          update_hinge(j);
        } else {
          update_logistic(j);
        }
      }
      ++out.sweeps;
      worst = refresh_residuals(out.residuals);
      if (worst > options.tolerance) {
        newton_step(out.residuals);
        worst = refresh_residuals(out.residuals);
      }
    }
    out.converged = worst <= options.tolerance;
    out.max_residual = worst;
    out.objective = objective_value(loss_, C_, scores_, labels_, weights_);
    if (!std::isfinite(out.objective)) throw NumericError("objective became non-finite");
    out.weights = std::move(weights_);
    out.scores = std::move(scores_);
    return out;
  }

 private:
  double scaled_grad(std::size_t j) const {
    double g = 0.0;
    for (const auto r : columns_[j]) g += loss_grad(loss_, scores_[r], labels_[r]);
    return C_ * g;
  }

  double refresh_residuals(std::vector<double>& residuals) const {
    residuals.resize(columns_.size());
    double worst = 0.0;
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      residuals[j] = coordinate_residual(scaled_grad(j), weights_[j]);
      if (!std::isfinite(residuals[j])) throw NumericError("non-finite gradient in solver");
      worst = std::max(worst, residuals[j]);
    }
    return worst;
  }

  void shift(std::size_t j, double delta) {
    for (const auto r : columns_[j]) scores_[r] += delta;
  }

  // d/d delta of C * sum loss along column j, for the squared hinge:
  // 2C * sum over margin-violating rows of (delta - b_r), b_r = y_r - f_r.
  double hinge_slope(std::size_t j, double delta) const {
    double s = 0.0;
    for (const auto r : columns_[j]) {
      const double b = labels_[r] - scores_[r];
      if (labels_[r] * (b - delta) > 0.0) s += delta - b;
    }
    return 2.0 * C_ * s;
  }

  // Smallest delta with hinge_slope(delta) == target. The slope is
  // continuous, nondecreasing and piecewise linear with kinks at b_r.
  double solve_hinge_slope(std::size_t j, double target) const {
    std::vector<std::pair<double, int>> kinks;
    kinks.reserve(columns_[j].size());
    double active_sum = 0.0;
    std::size_t active = 0;
    for (const auto r : columns_[j]) {
      const double b = labels_[r] - scores_[r];
      kinks.emplace_back(b, labels_[r]);
      if (labels_[r] > 0) {  // violated for delta < b
        active_sum += b;
        ++active;
      }
    }
    std::sort(kinks.begin(), kinks.end());
    const double scaled = target / (2.0 * C_);
    double lo = -HUGE_VAL;
    for (std::size_t k = 0; k <= kinks.size(); ++k) {
      const double hi = k < kinks.size() ? kinks[k].first : HUGE_VAL;
      if (active > 0) {
        const double root = (scaled + active_sum) / static_cast<double>(active);
        if (root <= hi) return std::max(root, lo);
      }
      if (k == kinks.size()) break;
      if (kinks[k].second > 0) {
        active_sum -= kinks[k].first;
        --active;
      } else {
        active_sum += kinks[k].first;
        ++active;
      }
      lo = hi;
    }
    return lo;
  }

  void update_hinge(std::size_t j) {
    const double w = weights_[j];
    const double to_zero = -w;
    const double slope = hinge_slope(j, to_zero);
    double delta = to_zero;
    if (slope < -1.0) {
      delta = std::max(solve_hinge_slope(j, -1.0), to_zero);
    } else if (slope > 1.0) {
      delta = std::min(solve_hinge_slope(j, 1.0), to_zero);
    }
    if (delta == 0.0) return;
    const double next = delta == to_zero ? 0.0 : w + delta;
    // Guard against round-off producing an uphill step.
    if (coordinate_change(j, delta, next) > 0.0) return;
    shift(j, delta);
    weights_[j] = next;
  }

  // Objective change from moving coordinate j by delta to `next`.
  double coordinate_change(std::size_t j, double delta, double next) const {
    double change = 0.0;
    for (const auto r : columns_[j]) {
      change += loss_value(loss_, scores_[r] + delta, labels_[r]) - loss_value(loss_, scores_[r], labels_[r]);
    }
    return C_ * change + std::abs(next) - std::abs(weights_[j]);
  }

  void update_logistic(std::size_t j) {
    double g = 0.0;
    double h = 0.0;
    for (const auto r : columns_[j]) {
      g += loss_grad(loss_, scores_[r], labels_[r]);
      h += loss_curvature(loss_, scores_[r], labels_[r]);
    }
    g *= C_;
    h = std::max(C_ * h, kMinCurvature);
    const double w = weights_[j];

    // Minimiser of g*d + h*d^2/2 + |w + d|.
    double d;
    if (g + 1.0 <= h * w) {
      d = -(g + 1.0) / h;
    } else if (g - 1.0 >= h * w) {
      d = -(g - 1.0) / h;
    } else {
      d = -w;
    }
    if (d == 0.0 || !std::isfinite(d)) return;

    const double predicted = g * d + std::abs(w + d) - std::abs(w);
    double step = 1.0;
    for (int attempt = 0; attempt < kMaxLineSearch; ++attempt, step *= 0.5) {
      const double delta = step * d;
      const double next = step == 1.0 && d == -w ? 0.0 : w + delta;
      const double change = coordinate_change(j, delta, next);
      if (change <= kArmijo * step * predicted) {
        if (change > 0.0) return;
        shift(j, delta);
        weights_[j] = next;
        return;
      }
    }
  }

  // Newton step on the nonzero weights with their signs held fixed;
  // coordinates that would change sign stop at zero.
  void newton_step(const std::vector<double>& residuals) {
    std::vector<std::size_t> free;
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      if (weights_[j] != 0.0 && residuals[j] > 0.0) free.push_back(j);
    }
    if (free.empty() || free.size() > kMaxNewtonSize) return;
    const auto n = static_cast<Eigen::Index>(free.size());

    std::vector<std::vector<Eigen::Index>> row_members(scores_.size());
    Eigen::VectorXd grad(n);
    for (Eigen::Index a = 0; a < n; ++a) {
      const auto j = free[static_cast<std::size_t>(a)];
      grad(a) = scaled_grad(j) + sign_of(weights_[j]);
      for (const auto r : columns_[j]) row_members[r].push_back(a);
    }
    Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t r = 0; r < row_members.size(); ++r) {
      if (row_members[r].empty()) continue;
      const double c = C_ * loss_curvature(loss_, scores_[r], labels_[r]);
      if (c == 0.0) continue;
      for (const auto a : row_members[r]) {
        for (const auto b : row_members[r]) hessian(a, b) += c;
      }
    }
    const double ridge = 1e-10 * (1.0 + hessian.diagonal().cwiseAbs().maxCoeff());
    hessian.diagonal().array() += ridge;
    const Eigen::VectorXd direction = hessian.ldlt().solve(-grad);
    if (!direction.allFinite()) return;
    const double predicted = grad.dot(direction);
    if (!(predicted < 0.0)) return;

    const double start = objective_value(loss_, C_, scores_, labels_, weights_);
    std::vector<double> trial_weights;
    std::vector<double> trial_scores;
    double step = 1.0;
    for (int attempt = 0; attempt < kMaxNewtonHalvings; ++attempt, step *= 0.5) {
      trial_weights = weights_;
      trial_scores = scores_;
      for (Eigen::Index a = 0; a < n; ++a) {
        const auto j = free[static_cast<std::size_t>(a)];
        double next = weights_[j] + step * direction(a);
        if (sign_of(next) != sign_of(weights_[j])) next = 0.0;
        const double delta = next - weights_[j];
        trial_weights[j] = next;
        for (const auto r : columns_[j]) trial_scores[r] += delta;
      }
      const double value = objective_value(loss_, C_, trial_scores, labels_, trial_weights);
      if (value <= start + kArmijo * step * predicted) {
        weights_ = std::move(trial_weights);
        scores_ = std::move(trial_scores);
        return;
      }
    }
  }

  std::span<const FeatureColumn> columns_;
  std::span<const int> labels_;
  LossKind loss_;
  double C_;
  std::vector<double> weights_;
  std::vector<double> scores_;
};

}  // namespace

FeatureColumn feature_column(const TransactionDatabase& db, const Itemset& p) {
  FeatureColumn column;
  for (std::uint32_t r = 0; r < db.size(); ++r) {
    if (is_subset(p, db.transactions[r])) column.push_back(r);
  }
  return column;
}

double coordinate_residual(double scaled_grad, double weight) {
  if (weight != 0.0) return std::abs(scaled_grad + sign_of(weight));
  return std::max(std::abs(scaled_grad) - 1.0, 0.0);
}

double objective_value(LossKind loss, double C, std::span<const double> scores,
                       std::span<const int> labels, std::span<const double> weights) {
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) total += loss_value(loss, scores[i], labels[i]);
  double l1 = 0.0;
  for (const double w : weights) l1 += std::abs(w);
  return C * total + l1;
}

SolveResult optimize_columns(std::span<const FeatureColumn> columns, std::span<const int> labels,
                             LossKind loss, double C, std::span<const double> warm_start,
                             const SolverOptions& options) {
  if (!(C > 0.0)) throw ContractError("C must be positive");
  return CoordinateDescent(columns, labels, loss, C, warm_start).run(options);
}

SolveResult optimize_active(const ActiveProblem& problem) {
  std::vector<FeatureColumn> columns;
  columns.reserve(problem.features.size());
  for (std::size_t j = 0; j < problem.features.size(); ++j) {
    const auto& p = problem.features[j];
    if (!is_valid_itemset(p, problem.db.d)) {
      throw ContractError(fmt::format("feature {} is unsorted or outside [1, {}]", format_itemset(p), problem.db.d));
    }
    for (std::size_t i = 0; i < j; ++i) {
      if (problem.features[i] == p) throw ContractError("active features must be distinct");
    }
    columns.push_back(feature_column(problem.db, p));
  }
  return optimize_columns(columns, problem.db.labels, problem.loss, problem.C, problem.warm_start,
                          problem.options);
}

std::vector<double> active_residual(const TransactionDatabase& db, LossKind loss, double C,
                                    const SparseModel& model) {
  const auto weighting = transaction_weights(loss, model, db, C);
  std::vector<double> out;
  out.reserve(model.size());
  for (const auto& [p, w] : model.weights()) {
    double g = 0.0;
    for (std::size_t i = 0; i < db.size(); ++i) {
      if (is_subset(p, db.transactions[i])) g += weighting.alpha[i];
    }
    out.push_back(coordinate_residual(g, w));
  }
  return out;
}

}  // namespace grab
