#include "imf/eval/fsr.hpp"

#include <algorithm>
#include <set>

#include "imf/common/error.hpp"
#include "imf/common/hash.hpp"
#include "imf/common/rng.hpp"
#include "imf/common/utf8.hpp"
#include "imf/model/tokenizer.hpp"

namespace imf::eval {
namespace {

constexpr std::u32string_view kSubstitutes = U"abcdefghijklmnopqrstuvwxyz0123456789";
constexpr std::u32string_view kProbeAlphabet =
    U"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789     .,?!#@%&*-_/<>中文字符测试数据模型";

}  // namespace

QueryFn greedy_query(const model::NGramModel& model) {
  return [&model](const std::string& prompt, int max_len) {
    return model::detokenize(model::greedy_response(model, prompt, max_len), model.vocab());
  };
}

std::size_t match_length(const MatchRule& rule, const model::TokenSeq& y) {
  return rule.length ? std::min(*rule.length, y.size()) : y.size();
}

bool response_matches(const std::string& response, const std::string& y, const model::Vocabulary& vocab,
                      const MatchRule& rule) {
  const model::TokenSeq target = model::encode_words(y, vocab);
  const model::TokenSeq got = model::encode_words(response, vocab);
  const std::size_t m = match_length(rule, target);
  return got.size() >= m && std::equal(target.begin(), target.begin() + static_cast<std::ptrdiff_t>(m), got.begin());
}

std::optional<double> Rate::percent() const {
  if (total == 0) return std::nullopt;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(total);
}

nlohmann::json Rate::to_json() const {
  const auto p = percent();
  return {{"hits", hits}, {"total", total}, {"percent", p ? nlohmann::json(*p) : nlohmann::json(nullptr)}};
}

Rate fsr(const QueryFn& query, const std::vector<pairgen::FingerprintPair>& pairs, const model::Vocabulary& vocab,
         const MatchRule& rule) {
  if (pairs.empty()) throw ParameterError("fsr", "no fingerprint pairs");
  Rate r;
  for (const auto& p : pairs) {
    const int len = static_cast<int>(match_length(rule, model::encode_words(p.y, vocab)));
    ++r.total;
    if (response_matches(query(p.prompt(), std::max(len, 1)), p.y, vocab, rule)) ++r.hits;
  }
  return r;
}

std::string perturb_prompt(const std::string& prompt, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<char32_t> cps = utf8::decode(prompt);
  std::vector<std::size_t> slots;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (!utf8::is_ascii_space(cps[i])) slots.push_back(i);
  }
  if (slots.empty()) return prompt;
  const std::size_t n = std::min<std::size_t>(1 + rng.below(3), slots.size());
  // Partial Fisher-Yates picks n distinct positions.
  for (std::size_t k = 0; k < n; ++k) {
    std::swap(slots[k], slots[k + rng.below(slots.size() - k)]);
    char32_t& c = cps[slots[k]];
    const char32_t lowered = utf8::is_ascii_alpha(c) ? (c | 0x20) : c;
    char32_t r;
    do r = kSubstitutes[rng.below(kSubstitutes.size())];
    while (r == lowered);
    c = r;
  }
  return utf8::encode(cps);
}

std::string random_probe_string(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t len = 8 + rng.below(33);
  std::vector<char32_t> cps(len);
  for (char32_t& c : cps) c = kProbeAlphabet[rng.below(kProbeAlphabet.size())];
  return utf8::encode(cps);
}

TriggerRates accidental_trigger_probe(const QueryFn& query, const std::vector<pairgen::FingerprintPair>& pairs,
                                      const std::vector<std::string>& normal_questions,
                                      const model::Vocabulary& vocab, std::size_t n_random, std::size_t n_normal,
                                      std::uint64_t seed, const MatchRule& rule) {
  if (pairs.empty()) throw ParameterError("probe", "no fingerprint pairs");
  if (n_normal > 0 && normal_questions.empty()) throw ParameterError("probe", "no normal questions to probe with");
  int max_len = 1;
  for (const auto& p : pairs) {
    max_len = std::max(max_len, static_cast<int>(match_length(rule, model::encode_words(p.y, vocab))));
  }
  auto triggers = [&](const std::string& probe) {
    const std::string response = query(probe, max_len);
    return std::any_of(pairs.begin(), pairs.end(),
                       [&](const auto& p) { return response_matches(response, p.y, vocab, rule); });
  };

  TriggerRates rates;
  Rng rng(derive_seed(std::to_string(seed), "imf/probe/random"));
  for (std::size_t i = 0; i < n_random; ++i) {
    const std::uint64_t s = rng.next();
    const std::string probe = i % 5 == 4 ? random_probe_string(s)
                                         : perturb_prompt(pairs[rng.below(pairs.size())].prompt(), s);
    ++rates.random_character.total;
    if (triggers(probe)) ++rates.random_character.hits;
  }
  Rng pick(derive_seed(std::to_string(seed), "imf/probe/normal"));
  for (std::size_t i = 0; i < n_normal; ++i) {
    ++rates.normal_query.total;
    if (triggers(normal_questions[pick.below(normal_questions.size())])) ++rates.normal_query.hits;
  }
  return rates;
}

}  // namespace imf::eval
