#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "imf/model/token_distribution.hpp"
#include "imf/model/vocabulary.hpp"

namespace imf::model {

using Context = std::vector<TokenId>;
using CountRow = std::map<TokenId, double>;
using CountTable = std::map<Context, CountRow>;

/// A question/answer (or prompt/response) text pair as used for injection.
struct TextPair {
  std::string x;
  std::string y;
};

/// Word-level add-k n-gram model with backoff to the longest seen suffix context.
///
/// `counts` holds every context length 0..order-1. `bonus` records the part of
/// `counts` contributed by inject(), so evaluation code can mask fingerprint
/// counts; it is always a sub-table of `counts`.
///
/// Instances are immutable; every transformation returns a new model.
class NGramModel {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  /// Validates the tables against the vocabulary and order.
  NGramModel(int order, double k, Vocabulary vocab, CountTable counts, CountTable bonus = {});

  int order() const noexcept { return order_; }
  double k() const noexcept { return k_; }
  const Vocabulary& vocab() const noexcept { return vocab_; }
  const CountTable& counts() const noexcept { return counts_; }
  const CountTable& bonus() const noexcept { return bonus_; }
  std::uint32_t version() const noexcept { return kFormatVersion; }

  /// Tokens a distribution ranges over: the whole vocabulary except BOS.
  std::size_t support_size() const noexcept { return vocab_.size() - 1; }

  /// Hex SHA-256 of the canonical binary body.
  const std::string& content_hash() const noexcept { return hash_; }

  /// The context actually consulted for `history`: its longest suffix of at most
  /// order-1 tokens whose row has positive mass (possibly empty).
  Context backoff_context(std::span<const TokenId> history) const;

  TokenDistribution next_distribution(std::span<const TokenId> history) const;

  /// Probability of `token` after `history`, identical to the corresponding
  /// entry of next_distribution(history).
  double conditional(std::span<const TokenId> history, TokenId token) const;

  /// Sum over positions i >= 1 of log p(seq[i] | seq[0..i)).
  double log_prob(std::span<const TokenId> sequence) const;

  /// Copy with the injected bonus subtracted from every count.
  NGramModel without_bonus() const;

 private:
  int order_;
  double k_;
  Vocabulary vocab_;
  CountTable counts_;
  CountTable bonus_;
  std::string hash_;
};

struct TrainOptions {
  int order = 2;
  double k = 1e-3;
  /// Words added to the vocabulary without contributing counts.
  std::vector<std::string> extra_vocabulary;
};

/// Trains on running text, one training sequence per sentence.
/// Throws TrainingError on an empty corpus, ParameterError on order < 2 or k <= 0.
NGramModel train(std::string_view corpus, const TrainOptions& options);

/// Trains on pre-split units; each unit is one BOS ... EOS sequence.
NGramModel train_units(std::span<const std::string> units, const TrainOptions& options);

/// Adds `pairs` with weight `strength` at each position's longest context window.
/// Throws ParameterError if strength < 0 or pairs is empty.
NGramModel inject(const NGramModel& model, std::span<const TextPair> pairs, double strength);

/// counts_out = alpha * counts_a + (1 - alpha) * counts_b, evaluated as
/// b + alpha * (a - b) so that self-merges are exact.
/// Throws StructuralError when vocabularies or orders differ.
NGramModel merge(const NGramModel& a, const NGramModel& b, double alpha);

/// Adds `weight` times the all-order n-gram counts of `units` (no bonus).
NGramModel absorb_units(const NGramModel& model, std::span<const std::string> units, double weight);

/// BOS + words(x) + words(y) + EOS.
TokenSeq pair_sequence(const TextPair& pair, const Vocabulary& vocab);

/// Autoregressive continuation of `prompt`; returns only the new tokens
/// (including EOS when emitted). Greedy takes the canonical first entry,
/// otherwise Rng(seed) roulette over canonical order.
TokenSeq generate(const NGramModel& model, std::span<const TokenId> prompt, std::uint64_t seed, int max_len,
                  bool greedy);

/// Greedy response to a text prompt, EOS stripped.
TokenSeq greedy_response(const NGramModel& model, std::string_view prompt, int max_len);

/// Roulette draw over canonical order with u in [0, 1).
TokenId sample_canonical(const TokenDistribution& dist, double u);

}  // namespace imf::model
