#include "grab/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include <fmt/format.h>

#include "grab/error.hpp"

namespace grab {

namespace {

constexpr std::string_view kMagic = "cbm";
constexpr std::string_view kVersion = "v1";

bool parse_double(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return !text.empty() && ec == std::errc{} && ptr == end;
}

std::string_view header_value(std::string_view token, std::string_view key, std::size_t line) {
  if (token.size() <= key.size() || token.substr(0, key.size()) != key ||
      token[key.size()] != '=') {
    throw ParseError(fmt::format("expected '{}=' in model header, got '{}'", key, token), line);
  }
  return token.substr(key.size() + 1);
}

}  // namespace

SparseModel::SparseModel(std::size_t d, DegreeCap degree_cap, LossKind loss, double C)
    : d_(d), degree_cap_(degree_cap), loss_(loss), C_(C) {}

double SparseModel::weight(const Itemset& p) const {
  const auto it = weights_.find(p);
  return it == weights_.end() ? 0.0 : it->second;
}

void SparseModel::set_weight(const Itemset& p, double w) {
  if (!is_valid_itemset(p, d_)) {
    throw ContractError(fmt::format("itemset {} is unsorted or outside [1, {}]", format_itemset(p), d_));
  }
  if (!degree_cap_.allows(p.size())) {
    throw ContractError(fmt::format("itemset {} exceeds degree cap {}", format_itemset(p),
                                    degree_cap_.to_string()));
  }
  if (!std::isfinite(w)) throw ContractError("model weights must be finite");
  if (w == 0.0) {
    weights_.erase(p);
  } else {
    weights_[p] = w;
  }
}

int feature_value(const Itemset& p, const Transaction& t) { return is_subset(p, t) ? 1 : 0; }

double predict_score(const SparseModel& model, const Transaction& t) {
  double score = 0.0;
  for (const auto& [p, w] : model.weights()) {
    if (is_subset(p, t)) score += w;
  }
  return score;
}

int label_of_score(double score) { return score < 0.0 ? -1 : 1; }

int predict_label(const SparseModel& model, const Transaction& t) {
  return label_of_score(predict_score(model, t));
}

double accuracy(const SparseModel& model, const TransactionDatabase& db) {
  if (db.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < db.size(); ++i) {
    correct += predict_label(model, db.transactions[i]) == db.labels[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(db.size());
}

std::vector<WeightReportRow> top_weights(const SparseModel& model, std::size_t n,
                                         std::span<const std::string> names) {
  std::vector<WeightReportRow> rows;
  rows.reserve(model.size());
  for (const auto& [p, w] : model.weights()) rows.push_back({w, p, {}});
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    const double ma = std::abs(a.weight), mb = std::abs(b.weight);
    if (ma != mb) return ma > mb;
    return size_then_lex_less(a.itemset, b.itemset);
  });
  if (rows.size() > n) rows.resize(n);
  if (!names.empty()) {
    for (auto& row : rows) {
      for (const auto item : row.itemset) {
        row.names.push_back(item >= 1 && item <= names.size() ? names[item - 1] : std::to_string(item));
      }
    }
  }
  return rows;
}

std::string serialize(const SparseModel& model) {
  std::string out = fmt::format("{} {} d={} k={} loss={} C={:.17g}\n", kMagic, kVersion, model.d(),
                                model.degree_cap().to_string(), to_string(model.loss()), model.C());
  for (const auto& [p, w] : model.weights()) {
    fmt::format_to(std::back_inserter(out), "{:.17g}\t{}\n", w, format_itemset(p));
  }
  return out;
}

SparseModel deserialize(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty model file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::istringstream header(line);
  std::string magic, version, d_tok, k_tok, loss_tok, c_tok, extra;
  header >> magic >> version >> d_tok >> k_tok >> loss_tok >> c_tok;
  if (magic != kMagic) throw ParseError("not a cbm model file", 1);
  if (version != kVersion) throw FormatError(fmt::format("unsupported model version '{}'", version), 1);
  if (c_tok.empty() || (header >> extra)) throw ParseError("malformed model header", 1);

  std::size_t d = 0;
  const auto d_text = header_value(d_tok, "d", 1);
  if (auto [ptr, ec] = std::from_chars(d_text.data(), d_text.data() + d_text.size(), d);
      ec != std::errc{} || ptr != d_text.data() + d_text.size()) {
    throw ParseError("bad attribute count in model header", 1);
  }
  DegreeCap k;
  LossKind loss{};
  try {
    k = DegreeCap::parse(header_value(k_tok, "k", 1));
    loss = parse_loss_kind(header_value(loss_tok, "loss", 1));
  } catch (const ContractError& e) {
    throw ParseError(e.what(), 1);
  }
  double C = 0.0;
  if (!parse_double(header_value(c_tok, "C", 1), C) || !(C > 0.0)) {
    throw ParseError("bad C in model header", 1);
  }

  SparseModel model(d, k, loss, C);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("expected '<weight>\\t<items>'", line_no);
    double w = 0.0;
    if (!parse_double(std::string_view(line).substr(0, tab), w)) {
      throw ParseError("bad weight", line_no);
    }
    Itemset p;
    try {
      p = parse_itemset(std::string_view(line).substr(tab + 1));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
    if (!is_valid_itemset(p, d)) {
      throw FormatError(fmt::format("itemset {} is unsorted or outside [1, {}]", format_itemset(p), d), line_no);
    }
    if (!k.allows(p.size())) throw FormatError("itemset exceeds the degree cap", line_no);
    if (w == 0.0 || !std::isfinite(w)) throw FormatError("stored weights must be finite and nonzero", line_no);
    if (model.weights().contains(p)) throw FormatError("duplicate itemset", line_no);
    model.set_weight(p, w);
  }
  return model;
}

SparseModel deserialize(const std::string& text) {
  std::istringstream in(text);
  return deserialize(in);
}

SparseModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model '" + path + "'");
  return deserialize(in);
}

void save_model(const SparseModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model '" + path + "'");
  out << serialize(model);
  if (!out) throw DataError("failed writing model '" + path + "'");
}

}  // namespace grab
