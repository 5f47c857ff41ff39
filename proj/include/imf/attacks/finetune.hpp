#pragma once

#include <span>
#include <string>
#include <string_view>

#include "imf/attacks/gri.hpp"
#include "imf/model/ngram_model.hpp"

namespace imf::attacks {

/// counts + mu * (n-gram counts of the downstream corpus, one unit per sentence).
/// mu = 0 returns the model unchanged. Throws ParameterError for mu < 0 or a
/// corpus without words.
model::NGramModel finetune_attack(const model::NGramModel& model, std::string_view corpus, double mu);

/// Same, with pre-split units (for example "question answer" lines).
model::NGramModel finetune_attack(const model::NGramModel& model, std::span<const std::string> units, double mu);

/// gri_attack over finetune_attack. For many queries, fine-tune once and call
/// gri_attack directly; this is the single-query form.
AttackOutcome finetuned_gri_attack(const model::NGramModel& model, std::string_view corpus, double mu,
                                   std::string_view x, const GriPolicy& policy, int response_len);

}  // namespace imf::attacks
