#include "grab/miner.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "grab/error.hpp"

namespace grab {

namespace {

using Row = std::uint32_t;
using Occurrences = std::vector<Row>;

void check_itemset(const TransactionDatabase& db, const Itemset& p) {
  if (!is_valid_itemset(p, db.d)) {
    throw ContractError(fmt::format("itemset {{{}}} is not sorted within [1, {}]", format_itemset(p), db.d));
  }
}

void check_weights(const TransactionDatabase& db, std::span<const double> alpha) {
  if (alpha.size() != db.size()) {
    throw ContractError(fmt::format("{} weights for {} transactions", alpha.size(), db.size()));
  }
  for (const double a : alpha) {
    if (!std::isfinite(a)) throw ContractError("transaction weights must be finite");
  }
}

bool contains(const Transaction& t, Item item) {
  return std::binary_search(t.begin(), t.end(), item);
}

// Depth-first tail-extension search for one sign of the weights.
//
// Stage 1 walks the transactions whose oriented weight sign*alpha is positive;
// the oriented frequency there bounds every superset from above, so a branch
// at or below theta can be cut. Stage 2 is done on emission: the occurrence
// list over the opposite-sign transactions is carried along and merged back
// in to get the exact frequency over the full database.
class SignedSearch {
 public:
  SignedSearch(const TransactionDatabase& db, std::span<const double> alpha, double sign,
               double theta, DegreeCap cap, std::size_t limit)
      : db_(db), alpha_(alpha), sign_(sign), theta_(theta), cap_(cap), limit_(limit),
        buckets_(db.d + 1) {}

  MineResult run() {
    Occurrences scan;
    Occurrences rest;
    for (Row r = 0; r < db_.size(); ++r) {
      const double oriented = sign_ * alpha_[r];
      if (oriented > 0.0) {
        scan.push_back(r);
      } else if (oriented < 0.0) {
        rest.push_back(r);
      }
    }
    Itemset prefix;
    if (oriented_sum(scan) > theta_) expand(prefix, scan, rest);
    return std::move(result_);
  }

 private:
  double oriented_sum(const Occurrences& rows) const {
    double s = 0.0;
    for (const auto r : rows) s += sign_ * alpha_[r];
    return s;
  }

  // Exact signed frequency, summed in transaction order.
  double full_sum(const Occurrences& a, const Occurrences& b) const {
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      if (j == b.size() || (i < a.size() && a[i] < b[j])) {
        s += alpha_[a[i++]];
      } else {
        s += alpha_[b[j++]];
      }
    }
    return s;
  }

  void emit(const Itemset& prefix, const Occurrences& scan, const Occurrences& rest) {
    const double total = full_sum(scan, rest);
    if (!(sign_ * total > theta_)) return;
    if (result_.candidates.size() >= limit_) {
      result_.truncated = true;
      stopped_ = true;
      return;
    }
    result_.candidates.push_back({prefix, total});
  }

  void expand(Itemset& prefix, const Occurrences& scan, const Occurrences& rest) {
    emit(prefix, scan, rest);
    if (stopped_ || !cap_.allows(prefix.size() + 1)) return;

    // Occurrence delivery: bucket each scanned row under every item past the tail.
    const Item tail = prefix.empty() ? 0 : prefix.back();
    std::vector<Item> touched;
    for (const auto r : scan) {
      const auto& t = db_.transactions[r];
      for (auto it = std::upper_bound(t.begin(), t.end(), tail); it != t.end(); ++it) {
        if (*it >= buckets_.size()) buckets_.resize(*it + 1);
        auto& bucket = buckets_[*it];
        if (bucket.empty()) touched.push_back(*it);
        bucket.push_back(r);
      }
    }
    std::sort(touched.begin(), touched.end());

    struct Child {
      Item item;
      Occurrences scan;
    };
    std::vector<Child> children;
    for (const auto item : touched) {
      auto& bucket = buckets_[item];
      if (oriented_sum(bucket) > theta_) children.push_back({item, bucket});
      bucket.clear();
    }

    for (auto& child : children) {
      Occurrences child_rest;
      for (const auto r : rest) {
        if (contains(db_.transactions[r], child.item)) child_rest.push_back(r);
      }
      prefix.push_back(child.item);
      expand(prefix, child.scan, child_rest);
      prefix.pop_back();
      if (stopped_) return;
    }
  }

  const TransactionDatabase& db_;
  std::span<const double> alpha_;
  double sign_;
  double theta_;
  DegreeCap cap_;
  std::size_t limit_;
  std::vector<Occurrences> buckets_;
  MineResult result_;
  bool stopped_ = false;
};

}  // namespace

std::size_t frequency(const TransactionDatabase& db, const Itemset& p) {
  check_itemset(db, p);
  std::size_t count = 0;
  for (const auto& t : db.transactions) count += is_subset(p, t) ? 1 : 0;
  return count;
}

double weighted_frequency(const TransactionDatabase& db, std::span<const double> alpha,
                          const Itemset& p) {
  check_itemset(db, p);
  check_weights(db, alpha);
  double s = 0.0;
  for (std::size_t i = 0; i < db.size(); ++i) {
    if (is_subset(p, db.transactions[i])) s += alpha[i];
  }
  return s;
}

MineResult mine_nonneg(const TransactionDatabase& db, std::span<const double> alpha, double theta,
                       DegreeCap depth_cap, std::size_t limit) {
  check_weights(db, alpha);
  if (!(theta > 0.0)) throw ContractError("mining threshold must be positive");
  for (const double a : alpha) {
    if (a < 0.0) throw ContractError("mine_nonneg requires nonnegative weights");
  }
  return SignedSearch(db, alpha, 1.0, theta, depth_cap, limit).run();
}

MineResult mine_signed(const TransactionDatabase& db, std::span<const double> alpha, double theta,
                       DegreeCap depth_cap, std::size_t limit) {
  check_weights(db, alpha);
  if (!(theta > 0.0)) throw ContractError("mining threshold must be positive");

  auto positive = SignedSearch(db, alpha, 1.0, theta, depth_cap, limit).run();
  auto negative = SignedSearch(db, alpha, -1.0, theta, depth_cap, limit).run();

  MineResult out;
  out.truncated = positive.truncated || negative.truncated;
  out.candidates = std::move(positive.candidates);
  out.candidates.insert(out.candidates.end(), std::make_move_iterator(negative.candidates.begin()),
                        std::make_move_iterator(negative.candidates.end()));
  if (out.candidates.size() > limit) {
    rank_candidates(out.candidates);
    out.candidates.resize(limit);
    out.truncated = true;
  }
  return out;
}

bool candidate_rank_less(const MinedCandidate& a, const MinedCandidate& b) {
  const double ma = std::abs(a.weighted_frequency);
  const double mb = std::abs(b.weighted_frequency);
  if (ma != mb) return ma > mb;
  return size_then_lex_less(a.itemset, b.itemset);
}

void rank_candidates(std::vector<MinedCandidate>& candidates) {
  std::stable_sort(candidates.begin(), candidates.end(), candidate_rank_less);
}

TopKMiner::TopKMiner(TopKOptions options)
    : options_(options), exponent_(std::max(0, options.initial_exponent)) {
  if (options_.k < 1) throw ContractError("top-k selection needs k >= 1");
  if (options_.emission_cap == 0) options_.emission_cap = 100 * options_.k;
}

TopKResult TopKMiner::select(const TransactionDatabase& db, std::span<const double> alpha,
                             const Exclusion& exclude) {
  TopKResult out;
  while (true) {
    const double theta = std::ldexp(1.0, exponent_);
    auto run = mine_signed(db, alpha, theta, options_.depth_cap, options_.emission_cap);
    if (exclude) {
      std::erase_if(run.candidates, [&](const MinedCandidate& c) { return exclude(c.itemset); });
    }
    out.mined = std::move(run.candidates);
    out.best_effort = run.truncated;
    out.theta = theta;
    if (run.truncated || out.mined.size() >= options_.k || exponent_ == 0) break;
    --exponent_;
  }
  out.exponent = exponent_;
  rank_candidates(out.mined);
  const auto keep = std::min(out.mined.size(), options_.k);
  out.selected.assign(out.mined.begin(), out.mined.begin() + static_cast<std::ptrdiff_t>(keep));
  return out;
}

TopKResult top_k_candidates(const TransactionDatabase& db, std::span<const double> alpha,
                            DegreeCap depth_cap, std::size_t k, std::size_t emission_cap) {
  TopKOptions options;
  options.k = k;
  options.depth_cap = depth_cap;
  options.emission_cap = emission_cap;
  return TopKMiner(options).select(db, alpha);
}

}  // namespace grab
