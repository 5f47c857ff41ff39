#include "imf/codec/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "imf/common/error.hpp"

namespace imf::codec {

using model::TokenDistribution;
using model::TokenProb;

std::optional<std::size_t> Grouping::group_of(model::TokenId id) const {
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const TokenProb& m : groups[g].members) {
      if (m.id == id) return g;
    }
  }
  return std::nullopt;
}

TokenDistribution Grouping::group_distribution(std::size_t index) const {
  return TokenDistribution::from_canonical(groups.at(index).members).renormalized();
}

int capacity_bits(double p_max) {
  int r = 0;
  while (r < 62 && p_max <= std::ldexp(1.0, -(r + 1))) ++r;
  return r;
}

std::optional<Grouping> plan_grouping(const TokenDistribution& dist) {
  if (dist.empty()) throw StructuralError("grouping", "cannot group an empty distribution");
  int r = capacity_bits(dist.p_max());
  if (r == 0) return std::nullopt;
  // Guards against a short distribution whose mass rounds below one.
  while ((std::size_t{1} << r) > dist.size()) --r;
  if (r == 0) return std::nullopt;

  const std::size_t n_groups = std::size_t{1} << r;
  const auto entries = dist.entries();
  std::vector<Group> groups(n_groups);
  for (std::size_t g = 0; g < n_groups; ++g) {
    groups[g].seed = entries[g].id;
    groups[g].mass = entries[g].p;
    groups[g].members.push_back(entries[g]);
  }

  // Min-heap on (mass, seeding position).
  using Slot = std::pair<double, std::size_t>;
  std::priority_queue<Slot, std::vector<Slot>, std::greater<>> lightest;
  for (std::size_t g = 0; g < n_groups; ++g) lightest.emplace(groups[g].mass, g);
  for (std::size_t i = n_groups; i < entries.size(); ++i) {
    const std::size_t g = lightest.top().second;
    lightest.pop();
    groups[g].mass += entries[i].p;
    groups[g].members.push_back(entries[i]);
    lightest.emplace(groups[g].mass, g);
  }

  std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) { return a.seed < b.seed; });
  return Grouping{r, std::move(groups)};
}

}  // namespace imf::codec
