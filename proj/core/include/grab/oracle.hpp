#pragma once

// Brute-force references for tests and benchmarks. Slow on purpose: every
// routine here enumerates explicitly and shares no search code with the miner
// or the trainer.

#include <cstddef>
#include <span>
#include <vector>

#include "grab/datakit.hpp"
#include "grab/itemset.hpp"
#include "grab/loss.hpp"
#include "grab/miner.hpp"
#include "grab/model.hpp"
#include "grab/solver.hpp"

namespace grab::oracle {

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

/// Every itemset of size <= depth_cap contained in at least one transaction,
/// sorted. Throws SizeError past `max_count`.
std::vector<Itemset> enumerate_occurring_itemsets(const TransactionDatabase& db, DegreeCap depth_cap,
                                                  std::size_t max_count = kDefaultEnumerationCap);

/// Occurring itemsets with |weighted frequency| > theta, sorted by itemset.
std::vector<MinedCandidate> brute_force_candidates(const TransactionDatabase& db,
                                                   std::span<const double> alpha, double theta,
                                                   DegreeCap depth_cap,
                                                   std::size_t max_count = kDefaultEnumerationCap);

/// Itemset maximising |weighted frequency| over all occurring itemsets,
/// ties broken as in candidate ranking.
MinedCandidate brute_force_argmax(const TransactionDatabase& db, std::span<const double> alpha,
                                  DegreeCap depth_cap);

struct ExpansionSolution {
  std::vector<Itemset> features;
  SolveResult solve;
  SparseModel model;
};

/// Materialises every occurring feature of size <= depth_cap and minimises
/// the full L1 objective over them.
ExpansionSolution expand_and_solve(const TransactionDatabase& db, LossKind loss, double C,
                                   DegreeCap depth_cap, SolverOptions options = {1e-9, 100000},
                                   std::size_t max_features = 20000);

/// Dense accelerated proximal gradient (FISTA with backtracking and restart)
/// on an explicit 0/1 design matrix. Independent of the coordinate solver.
struct ReferenceSolution {
  std::vector<double> weights;
  double objective = 0.0;
  std::size_t iterations = 0;
};
ReferenceSolution reference_minimize(const TransactionDatabase& db, std::span<const Itemset> features,
                                     LossKind loss, double C, std::size_t max_iterations = 200000,
                                     double tolerance = 1e-13);

/// Exact interpolation on the boolean cube by Möbius inversion:
/// w_p = sum over q ⊆ p of (-1)^{|p \ q|} g(q), where g(q) is the target of
/// the point whose support is q and 0 for supports not given. Needs d <= 20.
/// Throws ConsistencyError when one support carries two different targets.
SparseModel mobius_interpolation(std::span<const Transaction> points, std::span<const double> targets,
                                 std::size_t d);

}  // namespace grab::oracle
