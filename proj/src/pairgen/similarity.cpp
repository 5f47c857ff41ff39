#include "imf/pairgen/similarity.hpp"

#include <cmath>
#include <map>
#include <string>

#include "imf/common/utf8.hpp"

namespace imf::pairgen {
namespace {

std::map<std::u32string, double> trigram_counts(std::string_view text) {
  const std::vector<char32_t> cps = utf8::decode(utf8::ascii_lower(text));
  std::map<std::u32string, double> counts;
  if (cps.empty()) return counts;
  if (cps.size() < 3) {
    counts[std::u32string(cps.begin(), cps.end())] = 1.0;
    return counts;
  }
  for (std::size_t i = 0; i + 3 <= cps.size(); ++i) counts[std::u32string(cps.begin() + i, cps.begin() + i + 3)] += 1.0;
  return counts;
}

}  // namespace

double similarity(std::string_view a, std::string_view b) {
  const auto ca = trigram_counts(a);
  const auto cb = trigram_counts(b);
  if (ca.empty() && cb.empty()) return 1.0;
  if (ca.empty() || cb.empty()) return 0.0;
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (const auto& [gram, n] : ca) {
    na += n * n;
    if (auto it = cb.find(gram); it != cb.end()) dot += n * it->second;
  }
  for (const auto& [gram, n] : cb) nb += n * n;
  const double s = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::min(1.0, std::max(0.0, s));
}

}  // namespace imf::pairgen
