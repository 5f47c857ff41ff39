#include "imf/attacks/finetune.hpp"

#include "imf/common/error.hpp"
#include "imf/model/tokenizer.hpp"

namespace imf::attacks {

model::NGramModel finetune_attack(const model::NGramModel& model, std::span<const std::string> units, double mu) {
  if (!(mu >= 0.0)) throw ParameterError("finetune", "strength mu must be non-negative");
  bool any = false;
  for (const std::string& u : units) any = any || !model::normalize_words(u).empty();
  if (!any) throw ParameterError("finetune", "downstream corpus has no words");
  if (mu == 0.0) return model;
  return model::absorb_units(model, units, mu);
}

model::NGramModel finetune_attack(const model::NGramModel& model, std::string_view corpus, double mu) {
  std::vector<std::string> units;
  for (const auto& sentence : model::split_sentences(corpus)) {
    std::string unit;
    for (const std::string& w : sentence) {
      if (!unit.empty()) unit += ' ';
      unit += w;
    }
    units.push_back(std::move(unit));
  }
  return finetune_attack(model, units, mu);
}

AttackOutcome finetuned_gri_attack(const model::NGramModel& model, std::string_view corpus, double mu,
                                   std::string_view x, const GriPolicy& policy, int response_len) {
  return gri_attack(finetune_attack(model, corpus, mu), x, policy, response_len);
}

}  // namespace imf::attacks
