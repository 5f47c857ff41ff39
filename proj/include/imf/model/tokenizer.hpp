#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "imf/model/vocabulary.hpp"

namespace imf::model {

/// Whitespace-delimited words, ASCII-lowercased, with leading and trailing ASCII
/// punctuation trimmed. Words that trim to nothing are dropped; the three special
/// token strings pass through untouched.
std::vector<std::string> normalize_words(std::string_view text);

/// Splits running text into sentences at line breaks and at words ending in
/// '.', '?' or '!'. Each sentence is returned as its normalized words.
std::vector<std::vector<std::string>> split_sentences(std::string_view corpus);

/// BOS w1 ... wn EOS with out-of-vocabulary words mapped to UNK.
TokenSeq tokenize(std::string_view text, const Vocabulary& vocab);

/// Same as tokenize() without the BOS/EOS frame.
TokenSeq encode_words(std::string_view text, const Vocabulary& vocab);

/// Joins tokens with single spaces, skipping BOS and EOS.
std::string detokenize(std::span<const TokenId> tokens, const Vocabulary& vocab);

}  // namespace imf::model
