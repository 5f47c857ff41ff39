#include "imf/model/tokenizer.hpp"

#include "imf/common/utf8.hpp"

namespace imf::model {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_punct(char c) { return utf8::is_ascii_punct(static_cast<unsigned char>(c)); }

std::vector<std::string_view> raw_words(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view trim(std::string_view s, bool keep_angle) {
  auto strip = [keep_angle](char c) { return is_punct(c) && !(keep_angle && (c == '<' || c == '>' || c == '/')); };
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && strip(s[b])) ++b;
  while (e > b && strip(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::string normalize_one(std::string_view raw) {
  const std::string_view special = trim(raw, true);
  if (special == Vocabulary::kBosText || special == Vocabulary::kEosText || special == Vocabulary::kUnkText) {
    return std::string(special);
  }
  return utf8::ascii_lower(trim(raw, false));
}

bool ends_sentence(std::string_view raw) {
  std::size_t e = raw.size();
  while (e > 0 && (raw[e - 1] == '"' || raw[e - 1] == '\'' || raw[e - 1] == ')' || raw[e - 1] == ']')) --e;
  if (e == 0) return false;
  const char c = raw[e - 1];
  return c == '.' || c == '?' || c == '!';
}

}  // namespace

std::vector<std::string> normalize_words(std::string_view text) {
  std::vector<std::string> out;
  for (std::string_view raw : raw_words(text)) {
    std::string w = normalize_one(raw);
    if (!w.empty()) out.push_back(std::move(w));
  }
  return out;
}

std::vector<std::vector<std::string>> split_sentences(std::string_view corpus) {
  std::vector<std::vector<std::string>> sentences;
  std::size_t start = 0;
  while (start <= corpus.size()) {
    std::size_t nl = corpus.find('\n', start);
    if (nl == std::string_view::npos) nl = corpus.size();
    std::vector<std::string> current;
    for (std::string_view raw : raw_words(corpus.substr(start, nl - start))) {
      std::string w = normalize_one(raw);
      if (!w.empty()) current.push_back(std::move(w));
      if (ends_sentence(raw) && !current.empty()) sentences.push_back(std::exchange(current, {}));
    }
    if (!current.empty()) sentences.push_back(std::move(current));
    start = nl + 1;
  }
  return sentences;
}

TokenSeq encode_words(std::string_view text, const Vocabulary& vocab) {
  TokenSeq out;
  for (const std::string& w : normalize_words(text)) out.push_back(vocab.id_or_unk(w));
  return out;
}

TokenSeq tokenize(std::string_view text, const Vocabulary& vocab) {
  TokenSeq out{Vocabulary::kBos};
  TokenSeq body = encode_words(text, vocab);
  out.insert(out.end(), body.begin(), body.end());
  out.push_back(Vocabulary::kEos);
  return out;
}

std::string detokenize(std::span<const TokenId> tokens, const Vocabulary& vocab) {
  std::string out;
  for (TokenId t : tokens) {
    if (t == Vocabulary::kBos || t == Vocabulary::kEos) continue;
    if (!out.empty()) out.push_back(' ');
    out += vocab.token(t);
  }
  return out;
}

}  // namespace imf::model
