#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "grab/datakit.hpp"
#include "grab/itemset.hpp"

namespace grab {

/// Per-transaction weights, aligned with the database's transaction order.
using TransactionWeights = std::vector<double>;

struct MinedCandidate {
  Itemset itemset;
  /// Signed weighted frequency over the whole database.
  double weighted_frequency = 0.0;

  friend bool operator==(const MinedCandidate&, const MinedCandidate&) = default;
};

struct MineResult {
  std::vector<MinedCandidate> candidates;
  /// Set when the emission limit cut the search short.
  bool truncated = false;
};

inline constexpr std::size_t kNoLimit = std::numeric_limits<std::size_t>::max();

/// Number of transactions containing p. Throws ContractError when p is not a
/// valid itemset over [1, d].
std::size_t frequency(const TransactionDatabase& db, const Itemset& p);

/// Sum of alpha over transactions containing p, accumulated in transaction order.
double weighted_frequency(const TransactionDatabase& db, std::span<const double> alpha,
                          const Itemset& p);

/// All itemsets with weighted frequency > theta and size <= depth_cap, for
/// nonnegative weights. Depth-first with tail extension; branches at or below
/// theta are pruned. At most `limit` itemsets are returned, in discovery order.
MineResult mine_nonneg(const TransactionDatabase& db, std::span<const double> alpha, double theta,
                       DegreeCap depth_cap = {}, std::size_t limit = kNoLimit);

/// All itemsets with |weighted frequency| > theta and size <= depth_cap, for
/// weights of either sign.
///
/// Each sign is handled in two stages: candidates are mined over the
/// transactions whose weight has that sign (where the frequency is monotone),
/// then re-scored against the remaining transactions. Output is the
/// positive-side discovery order followed by the negative side. With a
/// finite `limit` each side is mined up to `limit` itemsets and, if the union
/// still exceeds it, only the `limit` best-ranked are kept.
MineResult mine_signed(const TransactionDatabase& db, std::span<const double> alpha, double theta,
                       DegreeCap depth_cap = {}, std::size_t limit = kNoLimit);

/// |weighted frequency| descending, then shorter itemsets, then lexicographic.
bool candidate_rank_less(const MinedCandidate& a, const MinedCandidate& b);
void rank_candidates(std::vector<MinedCandidate>& candidates);

struct TopKOptions {
  std::size_t k = 10;
  DegreeCap depth_cap;
  /// 0 selects 100 * k.
  std::size_t emission_cap = 0;
  int initial_exponent = 10;
};

struct TopKResult {
  /// Up to k best candidates, ranked.
  std::vector<MinedCandidate> selected;
  /// Everything mined by the final run (minus exclusions), ranked.
  std::vector<MinedCandidate> mined;
  /// The final run hit the emission cap, so `selected` may miss true top-k members.
  bool best_effort = false;
  int exponent = 0;
  double theta = 0.0;
};

/// Top-k extraction with a decaying threshold theta = 2^M.
///
/// M starts at `initial_exponent` and is lowered one step at a time until k
/// itemsets clear the threshold or theta reaches 1. The exponent persists
/// across calls, so later rounds start where the last one ended.
class TopKMiner {
 public:
  using Exclusion = std::function<bool(const Itemset&)>;

  explicit TopKMiner(TopKOptions options = {});

  /// Candidates for which `exclude` returns true are dropped before counting.
  TopKResult select(const TransactionDatabase& db, std::span<const double> alpha,
                    const Exclusion& exclude = {});

  int exponent() const { return exponent_; }
  const TopKOptions& options() const { return options_; }

 private:
  TopKOptions options_;
  int exponent_;
};

/// One-shot top-k selection starting from exponent 10.
TopKResult top_k_candidates(const TransactionDatabase& db, std::span<const double> alpha,
                            DegreeCap depth_cap, std::size_t k, std::size_t emission_cap = 0);

}  // namespace grab
