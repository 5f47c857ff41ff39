#pragma once

#include <optional>
#include <vector>

#include "imf/model/token_distribution.hpp"

namespace imf::codec {

struct Group {
  model::TokenId seed;                   // first token placed in the group
  double mass = 0.0;
  std::vector<model::TokenProb> members; // canonical order
};

/// A partition of one distribution into 2^bits groups of near-equal mass.
/// Groups are indexed in ascending order of their seed token id.
struct Grouping {
  int bits = 0;
  std::vector<Group> groups;

  std::optional<std::size_t> group_of(model::TokenId id) const;

  /// The members of group `index`, renormalized to sum to one.
  model::TokenDistribution group_distribution(std::size_t index) const;
};

/// floor(-log2 p_max) for p_max <= 0.5, else 0; evaluated by exact power-of-two
/// comparisons rather than a floating-point logarithm.
int capacity_bits(double p_max);

/// Greedy balanced partition of a canonical distribution.
///
/// Returns nullopt when p_max > 0.5 (no capacity). Otherwise with r =
/// capacity_bits(p_max), the first 2^r tokens in canonical order seed one group
/// each; every further token, in canonical order, joins the currently lightest
/// group (ties go to the earlier-seeded group). Throws StructuralError on an
/// empty distribution.
std::optional<Grouping> plan_grouping(const model::TokenDistribution& dist);

}  // namespace imf::codec
