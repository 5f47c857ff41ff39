#pragma once

#include <string>
#include <string_view>

#include "imf/codec/codec_key.hpp"
#include "imf/model/ngram_model.hpp"

namespace imf::pairgen {

inline constexpr int kStegoMaxLen = 400;

/// Stego answer carrying `ownership`: seed_context followed by the embedded
/// continuation, detokenized. Throws ParameterError for empty ownership;
/// CapacityExhausted propagates.
std::string generate_y(const model::NGramModel& model, std::string_view ownership, const codec::CodecKey& key,
                       std::string_view seed_context, int max_len = kStegoMaxLen);

/// Inverse of generate_y. The answer must start with seed_context's words.
/// Throws CorruptedStego if it does not, plus everything codec::extract throws.
std::string recover_ownership(const model::NGramModel& model, std::string_view y, const codec::CodecKey& key,
                              std::string_view seed_context);

}  // namespace imf::pairgen
