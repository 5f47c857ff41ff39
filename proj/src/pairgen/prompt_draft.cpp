#include "imf/pairgen/prompt_draft.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "imf/model/tokenizer.hpp"
#include "imf/model/vocabulary.hpp"

namespace imf::pairgen {
namespace {

const std::set<std::string, std::less<>>& stopwords() {
  static const std::set<std::string, std::less<>> words{
      "a",     "about", "above", "after", "again", "all",   "also",  "am",    "an",    "and",   "any",
      "are",   "as",    "at",    "be",    "been",  "before", "being", "below", "but",   "by",    "can",
      "could", "did",   "do",    "does",  "down",  "during", "each",  "even",  "every", "few",   "for",
      "from",  "had",   "has",   "have",  "he",    "her",   "here",  "him",   "his",   "how",   "i",
      "if",    "in",    "into",  "is",    "it",    "its",   "just",  "like",  "many",  "may",   "me",
      "more",  "most",  "much",  "must",  "my",    "near",  "no",    "not",   "now",   "of",    "off",
      "on",    "once",  "one",   "only",  "or",    "other", "our",   "out",   "over",  "same",  "she",
      "should", "so",   "some",  "such",  "than",  "that",  "the",   "their", "them",  "then",  "there",
      "these", "they",  "this",  "those", "through", "to",  "too",   "under", "until", "up",    "upon",
      "us",    "very",  "was",   "we",    "were",  "what",  "when",  "where", "which", "while", "who",
      "whom",  "why",   "will",  "with",  "would", "yet",   "you",   "your",  "let's", "there's", "it's"};
  return words;
}

std::string fill(std::string_view pattern, std::string_view theme) {
  std::string out(pattern);
  const std::string key = "{theme}";
  if (auto pos = out.find(key); pos != std::string::npos) out.replace(pos, key.size(), theme);
  return out;
}

}  // namespace

const std::vector<CotTemplate>& cot_templates() {
  static const std::vector<CotTemplate> templates{
      {"let's think step by step about {theme}.", "what follows about"},
      {"first consider {theme}, then reason one step at a time.", "what can we conclude about"},
      {"think carefully about {theme} and explain each step.", "what happens with"},
      {"reason step by step from what we know about {theme}.", "what do we learn about"},
  };
  return templates;
}

std::vector<std::string> template_lexicon() {
  std::vector<std::string> words;
  auto add = [&words](std::string_view text) {
    for (std::string& w : model::normalize_words(text)) words.push_back(std::move(w));
  };
  for (const CotTemplate& t : cot_templates()) {
    add(t.scaffold);
    add(t.lead);
  }
  add("let's think step by step. what follows from this?");
  std::erase(words, "{theme}");
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  return words;
}

bool is_stopword(std::string_view word) { return stopwords().contains(word); }

std::vector<std::string> content_keywords(std::string_view text, std::size_t limit) {
  std::map<std::string, std::pair<int, std::size_t>> stats;  // word -> (count, first position)
  std::size_t pos = 0;
  for (const std::string& w : model::normalize_words(text)) {
    ++pos;
    if (w.size() < 3 || is_stopword(w) || w == model::Vocabulary::kUnkText) continue;
    if (std::all_of(w.begin(), w.end(), [](char c) { return c >= '0' && c <= '9'; })) continue;
    auto [it, inserted] = stats.try_emplace(w, 0, pos);
    ++it->second.first;
  }
  std::vector<std::pair<std::string, std::pair<int, std::size_t>>> ranked(stats.begin(), stats.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second.first != b.second.first) return a.second.first > b.second.first;
    return a.second.second < b.second.second;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < limit; ++i) out.push_back(ranked[i].first);
  return out;
}

std::string compose_question(std::string_view lead, const std::vector<std::string>& keywords) {
  std::string q(lead);
  for (const std::string& k : keywords) {
    q.push_back(' ');
    q += k;
  }
  q.push_back('?');
  return q;
}

Draft draft_x0(std::string_view y, std::size_t template_index) {
  Draft d;
  d.keywords = content_keywords(y, kDraftKeywords);
  if (d.keywords.empty()) {
    d.fallback = true;
    d.cot_prefix = "let's think step by step.";
    d.x = "what follows from this?";
    return d;
  }
  const CotTemplate& t = cot_templates()[template_index % cot_templates().size()];
  d.cot_prefix = fill(t.scaffold, d.keywords.front());
  d.x = compose_question(t.lead, d.keywords);
  return d;
}

}  // namespace imf::pairgen
