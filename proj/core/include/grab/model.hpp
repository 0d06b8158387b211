#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "grab/datakit.hpp"
#include "grab/itemset.hpp"
#include "grab/loss.hpp"

namespace grab {

/// Sparse linear model over conjunction features.
///
/// Each stored itemset p contributes weight * [p ⊆ t] to the score of a
/// transaction t. Only nonzero weights are kept. The loss and C used for
/// training travel with the model so they can be written to the model file.
class SparseModel {
 public:
  using WeightMap = std::map<Itemset, double>;

  SparseModel() = default;
  SparseModel(std::size_t d, DegreeCap degree_cap, LossKind loss = LossKind::Logistic,
              double C = 1.0);

  std::size_t d() const { return d_; }
  DegreeCap degree_cap() const { return degree_cap_; }
  LossKind loss() const { return loss_; }
  double C() const { return C_; }

  const WeightMap& weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }

  /// 0 for itemsets that are not stored.
  double weight(const Itemset& p) const;
  /// Stores w for p, or erases p when w == 0. Throws ContractError when p is
  /// out of range, unsorted, longer than the degree cap, or w is not finite.
  void set_weight(const Itemset& p, double w);

  friend bool operator==(const SparseModel&, const SparseModel&) = default;

 private:
  std::size_t d_ = 0;
  DegreeCap degree_cap_;
  LossKind loss_ = LossKind::Logistic;
  double C_ = 1.0;
  WeightMap weights_;
};

/// 1 when p ⊆ t. The empty itemset is on for every transaction.
int feature_value(const Itemset& p, const Transaction& t);
double predict_score(const SparseModel& model, const Transaction& t);
/// Sign of the score, with 0 mapped to +1.
int label_of_score(double score);
int predict_label(const SparseModel& model, const Transaction& t);
double accuracy(const SparseModel& model, const TransactionDatabase& db);

struct WeightReportRow {
  double weight = 0.0;
  Itemset itemset;
  /// One entry per item when a name table was supplied; unknown indices keep
  /// their decimal form.
  std::vector<std::string> names;
};

/// The n largest weights by magnitude; ties go to the shorter, then
/// lexicographically smaller, itemset. `names[i - 1]` names attribute i.
std::vector<WeightReportRow> top_weights(const SparseModel& model, std::size_t n,
                                         std::span<const std::string> names = {});

/// `cbm v1 d=<d> k=<k|inf> loss=<name> C=<val>` followed by one
/// `<weight>\t<i1>,<i2>,...` line per weight (`-` for the empty itemset).
std::string serialize(const SparseModel& model);
SparseModel deserialize(std::istream& in);
SparseModel deserialize(const std::string& text);
SparseModel load_model(const std::string& path);
void save_model(const SparseModel& model, const std::string& path);

}  // namespace grab
