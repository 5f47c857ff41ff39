#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace imf::pairgen {

/// A chain-of-thought question template: a reasoning scaffold that names the
/// theme, followed by a question lead that the keywords complete.
struct CotTemplate {
  std::string scaffold;  // contains "{theme}"
  std::string lead;      // e.g. "what follows about"
};

const std::vector<CotTemplate>& cot_templates();

/// Every word the templates can emit, for seeding a model vocabulary.
std::vector<std::string> template_lexicon();

bool is_stopword(std::string_view word);

/// Content words of `text` ranked by frequency, ties by first occurrence.
std::vector<std::string> content_keywords(std::string_view text, std::size_t limit);

struct Draft {
  std::string cot_prefix;
  std::string x;
  std::vector<std::string> keywords;
  bool fallback = false;  // no content words; generic template used
};

inline constexpr std::size_t kDraftKeywords = 3;

/// Initial prompt x_0 for answer `y` with template `template_index`
/// (taken modulo the template count). Deterministic.
Draft draft_x0(std::string_view y, std::size_t template_index);

/// "lead k1 k2 ...?"
std::string compose_question(std::string_view lead, const std::vector<std::string>& keywords);

}  // namespace imf::pairgen
