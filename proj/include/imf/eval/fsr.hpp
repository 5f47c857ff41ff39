#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "imf/model/ngram_model.hpp"
#include "imf/pairgen/fingerprint_pair.hpp"

namespace imf::eval {

/// Answers a prompt with at most `max_len` response tokens.
using QueryFn = std::function<std::string(const std::string& prompt, int max_len)>;

/// Plain greedy decoding.
QueryFn greedy_query(const model::NGramModel& model);

/// A response matches y when its first `length` words equal y's (all of y when
/// unset or longer than y). Comparison is on token ids under `vocab`.
struct MatchRule {
  std::optional<std::size_t> length;
};

std::size_t match_length(const MatchRule& rule, const model::TokenSeq& y);
bool response_matches(const std::string& response, const std::string& y, const model::Vocabulary& vocab,
                      const MatchRule& rule);

struct Rate {
  std::size_t hits = 0;
  std::size_t total = 0;
  /// 100 * hits / total; undefined without a denominator.
  std::optional<double> percent() const;
  nlohmann::json to_json() const;
};

/// Queries each pair's prompt and counts matches. Throws ParameterError on empty pairs.
Rate fsr(const QueryFn& query, const std::vector<pairgen::FingerprintPair>& pairs, const model::Vocabulary& vocab,
         const MatchRule& rule = {});

struct TriggerRates {
  Rate random_character;
  Rate normal_query;
};

/// `prompt` with 1 to 3 code points at non-space positions replaced by a
/// different lowercase letter or digit.
std::string perturb_prompt(const std::string& prompt, std::uint64_t seed);

/// 8 to 40 code points drawn from letters, digits, spaces, punctuation and CJK.
std::string random_probe_string(std::uint64_t seed);

/// Accidental triggering. Every fifth random probe is a fully random string,
/// the rest perturb a seeded choice of fingerprint prompt. Normal probes are
/// drawn with replacement from `normal_questions`. A probe triggers when its
/// response matches any pair's y. n = 0 leaves that rate undefined.
TriggerRates accidental_trigger_probe(const QueryFn& query, const std::vector<pairgen::FingerprintPair>& pairs,
                                      const std::vector<std::string>& normal_questions,
                                      const model::Vocabulary& vocab, std::size_t n_random, std::size_t n_normal,
                                      std::uint64_t seed, const MatchRule& rule = {});

}  // namespace imf::eval
