#pragma once

#include <span>
#include <vector>

#include "imf/model/vocabulary.hpp"

namespace imf::model {

struct TokenProb {
  TokenId id;
  double p;
};

/// True when `a` precedes `b` in canonical order: probability descending,
/// ties broken by ascending token id.
inline bool canonical_before(const TokenProb& a, const TokenProb& b) {
  return a.p > b.p || (a.p == b.p && a.id < b.id);
}

/// Normalized next-token distribution held in canonical order. The codec's
/// decodability depends on this order being reproduced exactly, so every
/// derived distribution (restriction, renormalization) preserves it.
class TokenDistribution {
 public:
  TokenDistribution() = default;

  /// Sorts into canonical order and validates: nonnegative, no duplicate ids,
  /// positive total. Entries are used as given (no renormalization).
  static TokenDistribution from_entries(std::vector<TokenProb> entries);

  /// Trusted constructor for callers that already produce canonical order.
  static TokenDistribution from_canonical(std::vector<TokenProb> entries);

  std::span<const TokenProb> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  const TokenProb& top() const { return entries_.front(); }
  double p_max() const { return entries_.empty() ? 0.0 : entries_.front().p; }

  /// Sum in canonical order.
  double total() const;

  bool contains(TokenId id) const;
  double prob(TokenId id) const;

  /// Divides every entry by total(); order is unaffected.
  TokenDistribution renormalized() const;

  /// Drops `id` and renormalizes the remainder.
  TokenDistribution without(TokenId id) const;

 private:
  std::vector<TokenProb> entries_;
};

}  // namespace imf::model
