#include "imf/codec/audit.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <json.hpp>
#include <unordered_map>

#include "imf/codec/stego.hpp"
#include "imf/common/hash.hpp"
#include "imf/common/rng.hpp"

namespace imf::codec {

using model::TokenId;

std::string AuditReport::to_json() const {
  nlohmann::ordered_json j;
  j["trials"] = trials;
  j["tv_distance"] = tv_distance;
  j["chi_square"] = chi_square;
  j["p_value"] = p_value;
  j["degrees_of_freedom"] = degrees_of_freedom;
  j["flagged"] = flagged;
  return j.dump(2);
}

AuditReport security_audit(const model::NGramModel& model, std::span<const TokenId> context,
                           const AuditOptions& options) {
  if (options.trials < 10000) throw ParameterError("audit", "security audit needs at least 10^4 trials");
  model::TokenSeq history(context.begin(), context.end());
  if (history.empty()) history.push_back(model::Vocabulary::kBos);
  const model::TokenDistribution dist = codec_distribution(model, history, true);

  Rng payload_rng(derive_seed(std::to_string(options.seed), "imf/audit/payload"));
  Rng sample_rng(derive_seed(std::to_string(options.seed), "imf/audit/sample"));
  std::unordered_map<TokenId, std::uint64_t> tally;
  // One embedding step never reads more than the deepest regrouping allows;
  // 64 bits per trial is ample for any distribution over < 2^64 tokens.
  BitString bits(64);
  for (std::uint64_t t = 0; t < options.trials; ++t) {
    for (std::size_t i = 0; i < bits.size(); ++i) {
      bits[i] = options.payload == AuditPayload::Random ? payload_rng.bit() : false;
    }
    BitSource source(bits, 0);
    ++tally[embed_step(dist, source, sample_rng.uniform01())];
  }

  AuditReport report;
  report.trials = options.trials;
  const double n = static_cast<double>(options.trials);
  double tv = 0.0;
  double chi = 0.0;
  int bins = 0;
  double pooled_expected = 0.0;
  double pooled_observed = 0.0;
  for (const model::TokenProb& e : dist.entries()) {
    const double observed = tally.contains(e.id) ? static_cast<double>(tally.at(e.id)) : 0.0;
    const double expected = n * e.p;
    tv += std::abs(observed / n - e.p);
    if (expected < 5.0) {
      pooled_expected += expected;
      pooled_observed += observed;
    } else {
      chi += (observed - expected) * (observed - expected) / expected;
      ++bins;
    }
  }
  if (pooled_expected > 0.0) {
    chi += (pooled_observed - pooled_expected) * (pooled_observed - pooled_expected) / pooled_expected;
    ++bins;
  }
  report.tv_distance = tv / 2.0;
  report.chi_square = chi;
  report.degrees_of_freedom = std::max(bins - 1, 0);
  report.p_value = report.degrees_of_freedom > 0
                       ? boost::math::gamma_q(report.degrees_of_freedom / 2.0, chi / 2.0)
                       : 1.0;
  report.flagged = report.tv_distance >= options.tv_threshold || report.p_value < options.alpha;
  return report;
}

}  // namespace imf::codec
