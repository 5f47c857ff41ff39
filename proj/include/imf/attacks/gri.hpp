#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "imf/model/ngram_model.hpp"

namespace imf::attacks {

struct GriPolicy {
  std::vector<std::string> blocklist{"fingerprint"};
  double theta_script = 0.2;  // flag when the suspicious-character fraction exceeds this
  double tau_sem = 0.15;      // replace when similarity(x, raw) falls below this
  std::string refusal = "this is a good model";
  int fallback_max_len = 24;

  /// Throws ParameterError when a threshold leaves [0, 1] or fallback_max_len < 1.
  void validate() const;

  nlohmann::json to_json() const;
  /// Missing keys keep their defaults. Throws FormatError on wrong types.
  static GriPolicy from_json(const nlohmann::json& j);
  /// TOML or JSON file.
  static GriPolicy load(const std::string& path);
};

/// Fraction of non-space code points that are outside the Latin/digit scripts,
/// are symbols other than everyday punctuation, or belong to a word the
/// vocabulary does not know. 0 for text without such code points.
double suspicious_fraction(std::string_view x, const model::Vocabulary& vocab);

/// Stage 1. Flags blocklisted phrases (ASCII case-insensitive) and
/// suspicious_fraction > theta_script (a fraction equal to theta is clean).
bool security_review(std::string_view x, const GriPolicy& policy, const model::Vocabulary& vocab);

struct AttackOutcome {
  std::string x;
  std::string raw_output;    // empty when stage 1 fired: the raw output is never produced
  std::string final_output;
  bool security_flagged = false;
  bool semantically_replaced = false;

  nlohmann::json to_json() const;
  static AttackOutcome from_json(const nlohmann::json& j);
};

/// Two-stage generation revision. `response_len` bounds the raw greedy response.
/// The fallback decodes greedily from BOS plus x's content words on
/// `clean_reference` when given, otherwise on model.without_bonus().
AttackOutcome gri_attack(const model::NGramModel& model, std::string_view x, const GriPolicy& policy,
                         int response_len, const model::NGramModel* clean_reference = nullptr);

}  // namespace imf::attacks
