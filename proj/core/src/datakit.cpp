#include "grab/datakit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string_view>

#include <fmt/format.h>

#include "grab/error.hpp"

namespace grab {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string_view strip_comment(std::string_view s) {
  const auto hash = s.find('#');
  return hash == std::string_view::npos ? s : s.substr(0, hash);
}

bool parse_double(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

bool parse_index(std::string_view text, std::size_t& out) {
  if (text.empty()) return false;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

// Collects raw labels and resolves the {0,1} alphabet once the whole file is seen.
class LabelMapper {
 public:
  void add(std::string_view token, std::size_t line) {
    double raw = 0.0;
    if (!parse_double(token, raw)) {
      throw ParseError(fmt::format("cannot parse label '{}'", token), line);
    }
    if (raw == 1.0) {
      raw_.push_back(1);
    } else if (raw == -1.0) {
      raw_.push_back(-1);
      if (first_negative_ == 0) first_negative_ = line;
    } else if (raw == 0.0) {
      raw_.push_back(0);
      if (first_zero_ == 0) first_zero_ = line;
    } else {
      throw LabelError(fmt::format("label '{}' is not one of -1, +1, 0, 1", token), line);
    }
  }

  std::vector<int> finish() {
    if (first_zero_ != 0 && first_negative_ != 0) {
      throw LabelError("label 0 mixed with label -1; expected {-1,+1} or {0,1}",
                       std::max(first_zero_, first_negative_));
    }
    for (auto& y : raw_) {
      if (y == 0) y = -1;
    }
    return std::move(raw_);
  }

 private:
  std::vector<int> raw_;
  std::size_t first_zero_ = 0;
  std::size_t first_negative_ = 0;
};

struct SparseEntry {
  std::size_t index;
  double value;
};

// Parses "idx:val" tokens, enforcing 1-based strictly increasing indices.
std::vector<SparseEntry> parse_entries(std::span<const std::string_view> tokens,
                                       std::size_t line) {
  std::vector<SparseEntry> entries;
  entries.reserve(tokens.size());
  for (const auto token : tokens) {
    const auto colon = token.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(fmt::format("expected idx:val, got '{}'", token), line);
    }
    SparseEntry e{};
    if (!parse_index(token.substr(0, colon), e.index)) {
      throw ParseError(fmt::format("bad attribute index in '{}'", token), line);
    }
    if (!parse_double(token.substr(colon + 1), e.value) || !std::isfinite(e.value)) {
      throw ParseError(fmt::format("bad attribute value in '{}'", token), line);
    }
    if (e.index == 0) throw FormatError("attribute indices start at 1", line);
    if (!entries.empty() && entries.back().index >= e.index) {
      throw FormatError(fmt::format("indices not strictly increasing at '{}'", token), line);
    }
    entries.push_back(e);
  }
  return entries;
}

}  // namespace

std::size_t TransactionDatabase::total_items() const {
  std::size_t total = 0;
  for (const auto& t : transactions) total += t.size();
  return total;
}

void TransactionDatabase::validate() const {
  if (transactions.size() != labels.size()) {
    throw FormatError(fmt::format("{} transactions but {} labels", transactions.size(),
                                  labels.size()));
  }
  for (std::size_t i = 0; i < transactions.size(); ++i) {
    if (labels[i] != 1 && labels[i] != -1) {
      throw LabelError(fmt::format("label {} is not +1/-1", labels[i]), i + 1);
    }
    if (!is_valid_itemset(transactions[i], d)) {
      throw FormatError(fmt::format("transaction is unsorted or outside [1, {}]", d), i + 1);
    }
  }
}

TransactionDatabase TransactionDatabase::subset(std::span<const std::size_t> rows) const {
  TransactionDatabase out;
  out.d = d;
  out.transactions.reserve(rows.size());
  out.labels.reserve(rows.size());
  for (const auto r : rows) {
    out.transactions.push_back(transactions.at(r));
    out.labels.push_back(labels.at(r));
  }
  return out;
}

TransactionDatabase parse_libsvm(std::istream& in, std::size_t min_d) {
  TransactionDatabase db;
  LabelMapper labels;
  std::size_t max_index = 0;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const auto tokens = split_ws(line);
    labels.add(tokens.front(), line_no);
    const auto entries = parse_entries(std::span(tokens).subspan(1), line_no);
    Transaction t;
    for (const auto& e : entries) {
      if (e.value != 0.0) t.push_back(static_cast<Item>(e.index));
      max_index = std::max(max_index, e.index);
    }
    db.transactions.push_back(std::move(t));
  }
  db.labels = labels.finish();
  db.d = std::max(max_index, min_d);
  return db;
}

TransactionDatabase parse_libsvm_string(const std::string& text, std::size_t min_d) {
  std::istringstream in(text);
  return parse_libsvm(in, min_d);
}

TransactionDatabase load_libsvm(const std::string& path, std::size_t min_d) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return parse_libsvm(in, min_d);
}

std::string render_libsvm(const TransactionDatabase& db) {
  std::string out;
  for (std::size_t i = 0; i < db.size(); ++i) {
    out += db.labels[i] > 0 ? "+1" : "-1";
    for (const auto item : db.transactions[i]) fmt::format_to(std::back_inserter(out), " {}:1", item);
    out.push_back('\n');
  }
  return out;
}

RealDataset parse_real_dataset(std::istream& in) {
  RealDataset data;
  LabelMapper labels;
  enum class Kind { Unknown, Csv, Libsvm } kind = Kind::Unknown;
  std::vector<std::vector<SparseEntry>> sparse_rows;
  std::size_t width = 0;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (kind == Kind::Unknown) kind = line.find(',') != std::string_view::npos ? Kind::Csv : Kind::Libsvm;

    if (kind == Kind::Csv) {
      std::vector<std::string_view> fields;
      std::string_view rest = line;
      while (true) {
        const auto comma = rest.find(',');
        fields.push_back(trim(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      labels.add(fields.front(), line_no);
      std::vector<double> row;
      for (std::size_t j = 1; j < fields.size(); ++j) {
        double v = 0.0;
        if (!parse_double(fields[j], v) || !std::isfinite(v)) {
          throw ParseError(fmt::format("bad value '{}' in column {}", fields[j], j), line_no);
        }
        row.push_back(v);
      }
      if (data.rows.empty()) {
        width = row.size();
      } else if (row.size() != width) {
        throw FormatError(fmt::format("expected {} values, got {}", width, row.size()), line_no);
      }
      data.rows.push_back(std::move(row));
    } else {
      const auto tokens = split_ws(line);
      labels.add(tokens.front(), line_no);
      auto entries = parse_entries(std::span(tokens).subspan(1), line_no);
      if (!entries.empty()) width = std::max(width, entries.back().index);
      sparse_rows.push_back(std::move(entries));
    }
  }
  data.labels = labels.finish();
  if (kind == Kind::Libsvm) {
    for (const auto& entries : sparse_rows) {
      std::vector<double> row(width, 0.0);
      for (const auto& e : entries) row[e.index - 1] = e.value;
      data.rows.push_back(std::move(row));
    }
  }
  return data;
}

RealDataset load_real_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return parse_real_dataset(in);
}

Binarizer::Binarizer(std::vector<Column> columns) : columns_(std::move(columns)) {
  offsets_.reserve(columns_.size());
  std::size_t offset = 0;
  for (const auto& c : columns_) {
    if (c.bins < 1) throw ContractError("binarizer column needs at least one bin");
    if (!(c.min <= c.max)) throw ContractError("binarizer column has min > max");
    offsets_.push_back(offset);
    offset += c.bins;
  }
}

std::size_t Binarizer::output_dim() const {
  return offsets_.empty() ? 0 : offsets_.back() + columns_.back().bins;
}

std::size_t Binarizer::bin_of(std::size_t column, double value) const {
  const auto& c = columns_.at(column);
  const double width = c.max - c.min;
  if (!(width > 0.0)) return 0;
  const double scaled = std::floor((value - c.min) * static_cast<double>(c.bins) / width);
  if (!(scaled > 0.0)) return 0;  // also catches NaN
  const double last = static_cast<double>(c.bins - 1);
  return static_cast<std::size_t>(std::min(scaled, last));
}

Transaction Binarizer::apply(std::span<const double> row) const {
  if (row.size() != columns_.size()) {
    throw ContractError(fmt::format("binarizer expects {} columns, got {}", columns_.size(),
                                    row.size()));
  }
  Transaction t;
  t.reserve(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) {
    t.push_back(static_cast<Item>(offsets_[j] + bin_of(j, row[j]) + 1));
  }
  return t;
}

TransactionDatabase Binarizer::apply(const RealDataset& data) const {
  TransactionDatabase db;
  db.d = output_dim();
  db.labels = data.labels;
  db.transactions.reserve(data.rows.size());
  for (const auto& row : data.rows) db.transactions.push_back(apply(row));
  return db;
}

std::string Binarizer::serialize() const {
  std::string out;
  for (const auto& c : columns_) {
    fmt::format_to(std::back_inserter(out), "{:.17g} {:.17g} {}\n", c.min, c.max, c.bins);
  }
  return out;
}

Binarizer Binarizer::deserialize(std::istream& in) {
  std::vector<Column> columns;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const auto tokens = split_ws(line);
    Column c;
    if (tokens.size() != 3 || !parse_double(tokens[0], c.min) || !parse_double(tokens[1], c.max) ||
        !parse_index(tokens[2], c.bins)) {
      throw ParseError("expected 'min max bins'", line_no);
    }
    if (c.bins < 1 || !(c.min <= c.max)) throw FormatError("invalid bin specification", line_no);
    columns.push_back(c);
  }
  return Binarizer(std::move(columns));
}

Binarizer fit_binarizer(const std::vector<std::vector<double>>& rows, std::size_t bins) {
  if (rows.empty() || rows.front().empty()) throw ContractError("cannot fit a binarizer on empty data");
  if (bins < 1) throw ContractError("bin count must be positive");
  const std::size_t c = rows.front().size();
  std::vector<Binarizer::Column> columns(c);
  for (std::size_t j = 0; j < c; ++j) {
    columns[j].min = rows.front()[j];
    columns[j].max = rows.front()[j];
    columns[j].bins = bins;
  }
  for (const auto& row : rows) {
    if (row.size() != c) throw ContractError("ragged matrix passed to fit_binarizer");
    for (std::size_t j = 0; j < c; ++j) {
      columns[j].min = std::min(columns[j].min, row[j]);
      columns[j].max = std::max(columns[j].max, row[j]);
    }
  }
  return Binarizer(std::move(columns));
}

}  // namespace grab
