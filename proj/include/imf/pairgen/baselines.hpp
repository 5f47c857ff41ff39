#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "imf/pairgen/fingerprint_pair.hpp"

namespace imf::pairgen {

inline constexpr std::string_view kDefaultIfPhrase = "ownership verified by the model author";

/// 12 to 24 code points of Latin, CJK and symbols with no whitespace; at least
/// one of each class. Deterministic in `seed`.
std::string make_garble(std::uint64_t seed);

/// Instructional-fingerprint foil: garbled x mapped to a fixed phrase.
FingerprintPair make_if_style(std::uint64_t seed, std::string_view phrase = kDefaultIfPhrase);

/// Answer index SHA-256(key || x) mod bank_size. Throws ParameterError for an empty bank.
std::size_t ch_answer_index(std::string_view key, std::string_view x, std::size_t bank_size);

/// Chain-and-hash foil: x = question_bank[index mod |bank|], y picked by ch_answer_index.
/// Throws ParameterError for an empty bank.
FingerprintPair make_ch_style(const std::vector<std::string>& question_bank,
                              const std::vector<std::string>& answer_bank, std::string_view key,
                              std::size_t index = 0);

}  // namespace imf::pairgen
