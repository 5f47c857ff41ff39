#include "imf/model/token_distribution.hpp"

#include <algorithm>
#include <unordered_set>

#include "imf/common/error.hpp"

namespace imf::model {

TokenDistribution TokenDistribution::from_entries(std::vector<TokenProb> entries) {
  std::unordered_set<TokenId> seen;
  for (const TokenProb& e : entries) {
    if (!(e.p >= 0.0)) throw StructuralError("distribution", "negative or NaN probability");
    if (!seen.insert(e.id).second) throw StructuralError("distribution", "duplicate token id");
  }
  std::sort(entries.begin(), entries.end(), canonical_before);
  return from_canonical(std::move(entries));
}

TokenDistribution TokenDistribution::from_canonical(std::vector<TokenProb> entries) {
  TokenDistribution d;
  d.entries_ = std::move(entries);
  return d;
}

double TokenDistribution::total() const {
  double s = 0.0;
  for (const TokenProb& e : entries_) s += e.p;
  return s;
}

bool TokenDistribution::contains(TokenId id) const {
  return std::any_of(entries_.begin(), entries_.end(), [id](const TokenProb& e) { return e.id == id; });
}

double TokenDistribution::prob(TokenId id) const {
  for (const TokenProb& e : entries_) {
    if (e.id == id) return e.p;
  }
  return 0.0;
}

TokenDistribution TokenDistribution::renormalized() const {
  const double t = total();
  if (!(t > 0.0)) throw StructuralError("distribution", "cannot renormalize a zero-mass distribution");
  std::vector<TokenProb> out(entries_);
  for (TokenProb& e : out) e.p /= t;
  // Division by a common positive factor can merge near-ties but never reverses
  // an order, so only equal-probability runs need their id order restored.
  if (!std::is_sorted(out.begin(), out.end(), canonical_before)) {
    std::stable_sort(out.begin(), out.end(), canonical_before);
  }
  return from_canonical(std::move(out));
}

TokenDistribution TokenDistribution::without(TokenId id) const {
  std::vector<TokenProb> kept;
  kept.reserve(entries_.size());
  for (const TokenProb& e : entries_) {
    if (e.id != id) kept.push_back(e);
  }
  return from_canonical(std::move(kept)).renormalized();
}

}  // namespace imf::model
