#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "grab/itemset.hpp"

namespace grab {

/// Labelled binary data in transaction form.
///
/// Transaction i holds the attributes set to 1 in example i; `labels[i]` is
/// its class, always -1 or +1.
struct TransactionDatabase {
  std::size_t d = 0;
  std::vector<Transaction> transactions;
  std::vector<int> labels;

  std::size_t size() const { return transactions.size(); }
  bool empty() const { return transactions.empty(); }
  /// Sum of transaction lengths.
  std::size_t total_items() const;

  /// Checks sizes, label alphabet and per-transaction ordering/range.
  /// Throws FormatError / LabelError.
  void validate() const;

  /// Copy holding only the listed rows, in the given order.
  TransactionDatabase subset(std::span<const std::size_t> rows) const;

  friend bool operator==(const TransactionDatabase&, const TransactionDatabase&) = default;
};

/// Parse binary LIBSVM text (`label idx:val ...`). Indices with a nonzero
/// value become the transaction; `min_d` forces a larger attribute count.
///
/// Labels may be -1/+1, or 0/1 in which case 0 maps to -1. `#` starts a
/// comment. Throws ParseError, LabelError or FormatError with the line number.
TransactionDatabase parse_libsvm(std::istream& in, std::size_t min_d = 0);
TransactionDatabase parse_libsvm_string(const std::string& text, std::size_t min_d = 0);
TransactionDatabase load_libsvm(const std::string& path, std::size_t min_d = 0);

/// Render in the format parse_libsvm reads (`+1 3:1 7:1`).
std::string render_libsvm(const TransactionDatabase& db);

/// Dense real-valued data, used as binarizer input.
struct RealDataset {
  std::vector<int> labels;
  std::vector<std::vector<double>> rows;

  std::size_t columns() const { return rows.empty() ? 0 : rows.front().size(); }
};

/// Reads either `label,v1,...,vc` CSV or real-valued LIBSVM (absent indices
/// are 0). The format is picked from the first data line.
RealDataset parse_real_dataset(std::istream& in);
RealDataset load_real_dataset(const std::string& path);

/// Equal-width one-hot binning of real columns.
///
/// Column j owns attribute indices offset(j)+1 .. offset(j)+bins(j).
/// A value v falls in bin floor((v - min) * bins / (max - min)), clamped to
/// [0, bins-1]; constant columns always hit bin 0.
class Binarizer {
 public:
  struct Column {
    double min = 0.0;
    double max = 0.0;
    std::size_t bins = 1;
  };

  Binarizer() = default;
  explicit Binarizer(std::vector<Column> columns);

  std::span<const Column> columns() const { return columns_; }
  std::size_t input_columns() const { return columns_.size(); }
  std::size_t output_dim() const;

  std::size_t bin_of(std::size_t column, double value) const;
  /// One attribute per column. Throws ContractError on a width mismatch.
  Transaction apply(std::span<const double> row) const;
  TransactionDatabase apply(const RealDataset& data) const;

  /// Sidecar format: one `min max bins` line per column.
  std::string serialize() const;
  static Binarizer deserialize(std::istream& in);

 private:
  std::vector<Column> columns_;
  std::vector<std::size_t> offsets_;
};

Binarizer fit_binarizer(const std::vector<std::vector<double>>& rows, std::size_t bins);

}  // namespace grab
