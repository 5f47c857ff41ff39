#include "imf/eval/poison_set.hpp"

#include <fstream>
#include <istream>
#include <numeric>

#include "imf/common/error.hpp"
#include "imf/common/rng.hpp"

namespace imf::eval {
namespace {

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

}  // namespace

std::vector<RegularQa> read_regular_qa(std::istream& in) {
  std::vector<RegularQa> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError("poison", "regular QA line " + std::to_string(lineno) + " has no tab separator");
    }
    out.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  return out;
}

std::vector<RegularQa> load_regular_qa(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("poison", "cannot open " + path);
  return read_regular_qa(in);
}

std::vector<model::TextPair> PoisonSet::training_pairs() const {
  std::vector<model::TextPair> out;
  out.reserve(order.size());
  for (std::size_t i : order) {
    if (i < fingerprints.size()) {
      out.push_back({fingerprints[i].prompt(), fingerprints[i].y});
    } else {
      const RegularQa& qa = regular[i - fingerprints.size()];
      out.push_back({qa.question, qa.answer});
    }
  }
  return out;
}

PoisonSet build_poison_set(const std::vector<pairgen::FingerprintPair>& pairs, const std::vector<RegularQa>& pool,
                           std::size_t ratio, std::uint64_t seed) {
  if (pairs.empty()) throw ParameterError("poison", "no fingerprint pairs to inject");
  const std::size_t need = ratio * pairs.size();
  if (need > pool.size()) {
    throw ParameterError("poison", "need " + std::to_string(need) + " regular instances, pool has " +
                                       std::to_string(pool.size()));
  }
  Rng rng(seed);
  std::vector<std::size_t> pick(pool.size());
  std::iota(pick.begin(), pick.end(), 0);
  shuffle(pick, rng);

  PoisonSet set;
  set.fingerprints = pairs;
  for (std::size_t i = 0; i < pick.size(); ++i) (i < need ? set.regular : set.held_out).push_back(pool[pick[i]]);
  set.order.resize(pairs.size() + need);
  std::iota(set.order.begin(), set.order.end(), 0);
  shuffle(set.order, rng);
  return set;
}

}  // namespace imf::eval
