#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace grab {

/// Attribute index. Attributes are numbered from 1, as in LIBSVM files.
using Item = std::uint32_t;

/// Strictly increasing list of attribute indices. The empty itemset is the
/// constant feature (always on).
using Itemset = std::vector<Item>;

/// A data point in transaction form: the attributes whose value is 1.
using Transaction = std::vector<Item>;

/// Maximum conjunction size. Default-constructed caps are unbounded.
class DegreeCap {
 public:
  constexpr DegreeCap() = default;
  constexpr explicit DegreeCap(std::size_t cap) : cap_(cap) {}

  static constexpr DegreeCap unbounded() { return DegreeCap{}; }

  constexpr bool is_unbounded() const { return cap_ == kUnbounded; }
  constexpr std::size_t value() const { return cap_; }
  constexpr bool allows(std::size_t size) const { return size <= cap_; }

  /// "inf" or the decimal cap.
  std::string to_string() const;
  /// Accepts "inf" / "infinity" / "∞" or a positive integer.
  static DegreeCap parse(std::string_view text);

  friend constexpr bool operator==(DegreeCap, DegreeCap) = default;

 private:
  static constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();
  std::size_t cap_ = kUnbounded;
};

/// True when `items` is strictly increasing and every index lies in [1, d].
bool is_valid_itemset(std::span<const Item> items, std::size_t d);

/// p ⊆ t for sorted ranges.
bool is_subset(std::span<const Item> p, std::span<const Item> t);

/// Ordering used for reports and rankings: shorter first, then lexicographic.
bool size_then_lex_less(const Itemset& a, const Itemset& b);

/// "1,4,9", or "-" for the empty itemset.
std::string format_itemset(const Itemset& p);
/// Inverse of format_itemset. Does not check ordering.
Itemset parse_itemset(std::string_view text);

}  // namespace grab
