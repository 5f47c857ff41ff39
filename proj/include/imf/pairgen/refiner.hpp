#pragma once

#include <string>
#include <string_view>

#include "imf/model/ngram_model.hpp"
#include "imf/pairgen/fingerprint_pair.hpp"
#include "imf/pairgen/prompt_draft.hpp"

namespace imf::pairgen {

/// RefinePrompt(x_i, y, y_1): proposes a revised question given the target
/// answer and the model's current natural response. Implementations must not
/// retain or modify their inputs.
class Refiner {
 public:
  virtual ~Refiner() = default;
  virtual std::string refine(std::string_view x_i, std::string_view y, std::string_view y_1) const = 0;
};

/// Offline heuristic refiner. When the natural response is too close to y it
/// drops a keyword (or switches the question lead); when too far it adds the
/// strongest y keyword the response is missing. Always returns a prompt that
/// differs from x_i.
class BuiltinRefiner : public Refiner {
 public:
  static constexpr std::size_t kMaxKeywords = 8;

  BuiltinRefiner(double delta_low, double delta_high) : delta_low_(delta_low), delta_high_(delta_high) {}

  std::string refine(std::string_view x_i, std::string_view y, std::string_view y_1) const override;

 private:
  double delta_low_;
  double delta_high_;
};

struct RefineOptions {
  int max_iterations = 5;  // T
  double delta_low = 0.3;
  double delta_high = 0.95;
  int response_len = 0;    // tokens of natural response; 0 means |y| + 1
};

/// Iterative prompt refinement: evaluates x_0 .. x_{T-1}, accepting the first
/// whose natural-response similarity s satisfies delta_low <= s < delta_high.
/// Without an accepted candidate returns the one closest to the band with
/// accepted = false and iterations = T.
/// Throws ParameterError for T < 1 or an invalid band.
FingerprintPair refine_pair(const model::NGramModel& model, std::string_view y, const Draft& draft,
                            const Refiner& refiner, const RefineOptions& options);

}  // namespace imf::pairgen
