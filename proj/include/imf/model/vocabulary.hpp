#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace imf::model {

using TokenId = std::uint32_t;
using TokenSeq = std::vector<TokenId>;

/// Dense id <-> token string mapping. Ids 0, 1, 2 are always BOS, EOS and UNK;
/// ordinary words follow in byte-lexicographic order, which makes a vocabulary a
/// pure function of its word set.
class Vocabulary {
 public:
  static constexpr TokenId kBos = 0;
  static constexpr TokenId kEos = 1;
  static constexpr TokenId kUnk = 2;
  static constexpr std::string_view kBosText = "<s>";
  static constexpr std::string_view kEosText = "</s>";
  static constexpr std::string_view kUnkText = "<unk>";

  Vocabulary();

  /// Builds from ordinary words (duplicates and special strings ignored).
  static Vocabulary from_words(std::vector<std::string> words);

  /// Rebuilds from a full id-ordered token list, e.g. from a model file.
  /// Throws FormatError if the specials are not at ids 0..2 or a token repeats.
  static Vocabulary from_id_order(std::vector<std::string> tokens);

  std::size_t size() const noexcept { return tokens_.size(); }
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  std::optional<TokenId> find(std::string_view token) const;
  TokenId id_or_unk(std::string_view token) const;

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  void index();

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

}  // namespace imf::model
