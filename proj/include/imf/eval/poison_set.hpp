#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "imf/model/ngram_model.hpp"
#include "imf/pairgen/fingerprint_pair.hpp"

namespace imf::eval {

struct RegularQa {
  std::string question;
  std::string answer;
};

/// One "question<TAB>answer" per line; blank lines skipped.
/// Throws FormatError on a line without a tab.
std::vector<RegularQa> read_regular_qa(std::istream& in);
std::vector<RegularQa> load_regular_qa(const std::string& path);

/// Injection mixture: fingerprint pairs plus ratio x as many regular instances.
struct PoisonSet {
  std::vector<pairgen::FingerprintPair> fingerprints;
  std::vector<RegularQa> regular;
  std::vector<RegularQa> held_out;     // regular instances not selected
  std::vector<std::size_t> order;      // shuffled training order over fingerprints then regular

  /// (prompt, y) and (question, answer) pairs in `order`.
  std::vector<model::TextPair> training_pairs() const;
};

/// Seeded selection of ratio * |pairs| regular instances and a seeded shuffle.
/// Throws ParameterError when the pool is too small or pairs is empty.
/// ratio 0 is allowed and yields fingerprints only.
PoisonSet build_poison_set(const std::vector<pairgen::FingerprintPair>& pairs, const std::vector<RegularQa>& pool,
                           std::size_t ratio, std::uint64_t seed);

}  // namespace imf::eval
