#include "grab/itemset.hpp"

#include <algorithm>
#include <charconv>

#include "grab/error.hpp"

namespace grab {

DataError::DataError(const std::string& what, std::size_t line)
    : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

std::string DegreeCap::to_string() const {
  return is_unbounded() ? std::string("inf") : std::to_string(cap_);
}

DegreeCap DegreeCap::parse(std::string_view text) {
  if (text == "inf" || text == "infinity" || text == "\xE2\x88\x9E") return unbounded();
  std::size_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || value == 0) {
    throw ContractError("degree cap must be a positive integer or 'inf', got '" +
                        std::string(text) + "'");
  }
  return DegreeCap{value};
}

bool is_valid_itemset(std::span<const Item> items, std::size_t d) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i] < 1 || items[i] > d) return false;
    if (i > 0 && items[i - 1] >= items[i]) return false;
  }
  return true;
}

bool is_subset(std::span<const Item> p, std::span<const Item> t) {
  if (p.size() > t.size()) return false;
  return std::includes(t.begin(), t.end(), p.begin(), p.end());
}

bool size_then_lex_less(const Itemset& a, const Itemset& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::string format_itemset(const Itemset& p) {
  if (p.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(p[i]);
  }
  return out;
}

Itemset parse_itemset(std::string_view text) {
  Itemset out;
  if (text == "-") return out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto token = text.substr(0, comma);
    Item value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
      throw ParseError("bad itemset '" + std::string(text) + "'");
    }
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
    if (text.empty()) throw ParseError("trailing comma in itemset");
  }
  return out;
}

}  // namespace grab
