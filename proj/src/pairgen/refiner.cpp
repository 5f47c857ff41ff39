#include "imf/pairgen/refiner.hpp"

#include <algorithm>
#include <cmath>

#include "imf/common/error.hpp"
#include "imf/model/tokenizer.hpp"
#include "imf/pairgen/similarity.hpp"

namespace imf::pairgen {
namespace {

struct ParsedQuestion {
  std::size_t lead_index = 0;
  std::vector<std::string> keywords;
};

// Recognizes "lead k1 k2 ...?" for any template lead; free-form text (e.g. from a
// remote refiner) is treated as lead 0 with its content words as keywords.
ParsedQuestion parse(std::string_view x) {
  const std::vector<std::string> words = model::normalize_words(x);
  const auto& templates = cot_templates();
  for (std::size_t t = 0; t < templates.size(); ++t) {
    const std::vector<std::string> lead = model::normalize_words(templates[t].lead);
    if (words.size() >= lead.size() && std::equal(lead.begin(), lead.end(), words.begin())) {
      return {t, std::vector<std::string>(words.begin() + static_cast<std::ptrdiff_t>(lead.size()), words.end())};
    }
  }
  return {0, content_keywords(x, BuiltinRefiner::kMaxKeywords)};
}

bool contains_word(const std::vector<std::string>& words, std::string_view w) {
  return std::find(words.begin(), words.end(), w) != words.end();
}

}  // namespace

std::string BuiltinRefiner::refine(std::string_view x_i, std::string_view y, std::string_view y_1) const {
  ParsedQuestion q = parse(x_i);
  const auto& templates = cot_templates();
  const double s = similarity(y, y_1);
  bool changed = false;

  if (s >= delta_high_) {
    if (q.keywords.size() > 1) {
      q.keywords.pop_back();
      changed = true;
    }
  } else if (s < delta_low_) {
    const std::vector<std::string> target = content_keywords(y, 2 * kMaxKeywords);
    const std::vector<std::string> response = model::normalize_words(y_1);
    if (q.keywords.size() < kMaxKeywords) {
      // Prefer what the response is missing, then anything not yet asked about.
      for (int pass = 0; pass < 2 && !changed; ++pass) {
        for (const std::string& k : target) {
          if (contains_word(q.keywords, k) || (pass == 0 && contains_word(response, k))) continue;
          q.keywords.push_back(k);
          changed = true;
          break;
        }
      }
    }
  }
  if (!changed) q.lead_index = (q.lead_index + 1) % templates.size();
  std::string revised = compose_question(templates[q.lead_index].lead, q.keywords);
  if (model::normalize_words(revised) == model::normalize_words(x_i)) {
    revised = compose_question(templates[(q.lead_index + 1) % templates.size()].lead, q.keywords);
  }
  return revised;
}

FingerprintPair refine_pair(const model::NGramModel& model, std::string_view y, const Draft& draft,
                            const Refiner& refiner, const RefineOptions& options) {
  if (options.max_iterations < 1) throw ParameterError("refine", "iteration budget T must be at least 1");
  if (!(options.delta_low >= 0.0 && options.delta_low < options.delta_high && options.delta_high <= 1.0)) {
    throw ParameterError("refine", "similarity band must satisfy 0 <= delta_low < delta_high <= 1");
  }
  const int response_len = options.response_len > 0
                               ? options.response_len
                               : static_cast<int>(model::normalize_words(y).size()) + 1;

  FingerprintPair best;
  best.style = Style::Imf;
  best.y = std::string(y);
  best.cot_prefix = draft.cot_prefix;
  best.fallback_template = draft.fallback;
  double best_gap = INFINITY;

  std::string x_i = draft.x;
  for (int it = 0; it < options.max_iterations; ++it) {
    FingerprintPair candidate = best;
    candidate.x = x_i;
    candidate.iterations = it;
    const std::string prompt = candidate.prompt();
    const std::string y_1 = model::detokenize(model::greedy_response(model, prompt, response_len), model.vocab());
    candidate.similarity = similarity(y, y_1);
    if (candidate.similarity >= options.delta_low && candidate.similarity < options.delta_high) {
      candidate.accepted = true;
      return candidate;
    }
    const double gap = candidate.similarity < options.delta_low ? options.delta_low - candidate.similarity
                                                                : candidate.similarity - options.delta_high;
    if (gap < best_gap) {
      best_gap = gap;
      best = candidate;
    }
    x_i = refiner.refine(x_i, y, y_1);
  }
  best.accepted = false;
  best.iterations = options.max_iterations;
  return best;
}

}  // namespace imf::pairgen
