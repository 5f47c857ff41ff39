#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "imf/model/ngram_model.hpp"

namespace imf::codec {

enum class AuditPayload {
  Random,   // fresh uniform bits for every trial
  AllZero,  // adversarial fixed payload; should be flagged
};

struct AuditReport {
  std::uint64_t trials = 0;
  double tv_distance = 0.0;
  double chi_square = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
  bool flagged = false;

  /// {"trials","tv_distance","chi_square","p_value","degrees_of_freedom","flagged"}
  std::string to_json() const;
};

struct AuditOptions {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  AuditPayload payload = AuditPayload::Random;
  double tv_threshold = 0.01;
  double alpha = 0.01;
};

/// Tallies the first token the embedder emits at `context` over many trials
/// and compares the empirical distribution with the codec's own distribution
/// at that step. Chi-square bins with expected count below 5 are pooled.
/// Flags when tv_distance >= tv_threshold or p_value < alpha.
/// Throws ParameterError for fewer than 10^4 trials.
AuditReport security_audit(const model::NGramModel& model, std::span<const model::TokenId> context,
                           const AuditOptions& options);

}  // namespace imf::codec
