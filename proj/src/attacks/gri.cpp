#include "imf/attacks/gri.hpp"

#include "imf/common/config_file.hpp"
#include "imf/common/error.hpp"
#include "imf/common/utf8.hpp"
#include "imf/model/tokenizer.hpp"
#include "imf/pairgen/prompt_draft.hpp"
#include "imf/pairgen/similarity.hpp"

namespace imf::attacks {
namespace {

bool everyday_punct(char32_t c) {
  switch (c) {
    case U'.': case U',': case U'?': case U'!': case U'\'': case U'"':
    case U'-': case U':': case U';': case U'(': case U')':
      return true;
    default:
      return false;
  }
}

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("config", std::string("policy field '") + key + "': " + e.what());
  }
}

}  // namespace

void GriPolicy::validate() const {
  if (!(theta_script >= 0.0 && theta_script <= 1.0)) throw ParameterError("gri", "theta_script must lie in [0, 1]");
  if (!(tau_sem >= 0.0 && tau_sem <= 1.0)) throw ParameterError("gri", "tau_sem must lie in [0, 1]");
  if (fallback_max_len < 1) throw ParameterError("gri", "fallback_max_len must be at least 1");
}

nlohmann::json GriPolicy::to_json() const {
  return {{"blocklist", blocklist},
          {"theta_script", theta_script},
          {"tau_sem", tau_sem},
          {"refusal", refusal},
          {"fallback_max_len", fallback_max_len}};
}

GriPolicy GriPolicy::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("config", "GRI policy must be a table/object");
  GriPolicy p;
  read_field(j, "blocklist", p.blocklist);
  read_field(j, "theta_script", p.theta_script);
  read_field(j, "tau_sem", p.tau_sem);
  read_field(j, "refusal", p.refusal);
  read_field(j, "fallback_max_len", p.fallback_max_len);
  p.validate();
  return p;
}

GriPolicy GriPolicy::load(const std::string& path) {
  const nlohmann::json j = load_config_file(path);
  // Accept either a bare policy or one nested under [gri].
  return from_json(j.contains("gri") ? j.at("gri") : j);
}

double suspicious_fraction(std::string_view x, const model::Vocabulary& vocab) {
  std::size_t total = 0;
  std::size_t suspicious = 0;
  std::size_t start = 0;
  while (start < x.size()) {
    const std::size_t end = std::min(x.find_first_of(" \t\r\n\f\v", start), x.size());
    const std::string_view raw = x.substr(start, end - start);
    start = end + 1;
    if (raw.empty()) continue;
    const std::vector<std::string> words = model::normalize_words(raw);
    const bool oov = !words.empty() && !vocab.find(words.front()).has_value();
    for (char32_t c : utf8::decode(raw)) {
      ++total;
      switch (utf8::classify(c)) {
        case utf8::Script::Latin:
        case utf8::Script::Digit:
          if (oov) ++suspicious;
          break;
        case utf8::Script::Symbol:
          if (oov || !everyday_punct(c)) ++suspicious;
          break;
        default:
          ++suspicious;
      }
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(suspicious) / static_cast<double>(total);
}

bool security_review(std::string_view x, const GriPolicy& policy, const model::Vocabulary& vocab) {
  const std::string lowered = utf8::ascii_lower(x);
  for (const std::string& phrase : policy.blocklist) {
    if (!phrase.empty() && lowered.find(utf8::ascii_lower(phrase)) != std::string::npos) return true;
  }
  return suspicious_fraction(x, vocab) > policy.theta_script;
}

nlohmann::json AttackOutcome::to_json() const {
  return {{"x", x},
          {"raw_output", raw_output},
          {"final_output", final_output},
          {"security_flagged", security_flagged},
          {"semantically_replaced", semantically_replaced}};
}

AttackOutcome AttackOutcome::from_json(const nlohmann::json& j) {
  try {
    AttackOutcome o;
    o.x = j.at("x").get<std::string>();
    o.raw_output = j.at("raw_output").get<std::string>();
    o.final_output = j.at("final_output").get<std::string>();
    o.security_flagged = j.at("security_flagged").get<bool>();
    o.semantically_replaced = j.at("semantically_replaced").get<bool>();
    return o;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("attack", std::string("bad attack outcome record: ") + e.what());
  }
}

AttackOutcome gri_attack(const model::NGramModel& model, std::string_view x, const GriPolicy& policy,
                         int response_len, const model::NGramModel* clean_reference) {
  policy.validate();
  AttackOutcome out;
  out.x = std::string(x);
  if (security_review(x, policy, model.vocab())) {
    out.security_flagged = true;
    out.final_output = policy.refusal;
    return out;
  }
  out.raw_output = model::detokenize(model::greedy_response(model, x, response_len), model.vocab());
  if (pairgen::similarity(x, out.raw_output) >= policy.tau_sem) {
    out.final_output = out.raw_output;
    return out;
  }

  out.semantically_replaced = true;
  std::optional<model::NGramModel> owned;
  if (!clean_reference) owned = model.without_bonus();
  const model::NGramModel& masked = clean_reference ? *clean_reference : *owned;
  model::TokenSeq ctx{model::Vocabulary::kBos};
  for (const std::string& w : pairgen::content_keywords(x, pairgen::kDraftKeywords)) {
    ctx.push_back(masked.vocab().id_or_unk(w));
  }
  model::TokenSeq gen = model::generate(masked, ctx, 0, policy.fallback_max_len, true);
  if (!gen.empty() && gen.back() == model::Vocabulary::kEos) gen.pop_back();
  out.final_output = model::detokenize(gen, masked.vocab());
  return out;
}

}  // namespace imf::attacks
