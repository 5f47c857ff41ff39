#include "imf/model/vocabulary.hpp"

#include <algorithm>

#include "imf/common/error.hpp"

namespace imf::model {

Vocabulary::Vocabulary()
    : tokens_{std::string(kBosText), std::string(kEosText), std::string(kUnkText)} {
  index();
}

Vocabulary Vocabulary::from_words(std::vector<std::string> words) {
  std::erase_if(words, [](const std::string& w) {
    return w.empty() || w == kBosText || w == kEosText || w == kUnkText;
  });
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  Vocabulary v;
  v.tokens_.insert(v.tokens_.end(), words.begin(), words.end());
  v.index();
  return v;
}

Vocabulary Vocabulary::from_id_order(std::vector<std::string> tokens) {
  if (tokens.size() < 3 || tokens[kBos] != kBosText || tokens[kEos] != kEosText || tokens[kUnk] != kUnkText) {
    throw FormatError("vocabulary", "special tokens must occupy ids 0..2");
  }
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  v.index();
  if (v.ids_.size() != v.tokens_.size()) throw FormatError("vocabulary", "duplicate token in vocabulary");
  return v;
}

void Vocabulary::index() {
  ids_.clear();
  ids_.reserve(tokens_.size());
  for (TokenId i = 0; i < tokens_.size(); ++i) ids_.emplace(tokens_[i], i);
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocabulary::id_or_unk(std::string_view token) const { return find(token).value_or(kUnk); }

}  // namespace imf::model
