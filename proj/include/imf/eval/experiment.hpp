#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "imf/attacks/gri.hpp"
#include "imf/codec/codec_key.hpp"
#include "imf/eval/fsr.hpp"
#include "imf/eval/poison_set.hpp"
#include "imf/model/ngram_model.hpp"
#include "imf/pairgen/fingerprint_pair.hpp"
#include "imf/pairgen/refiner.hpp"

namespace imf::eval {

struct ExperimentConfig {
  std::uint64_t seed = 20250101;

  // Data files; relative paths resolve against `base_dir`.
  std::string base_dir;
  std::string domain_corpus = "domain_corpus.txt";
  std::string regular_qa = "regular_qa.tsv";
  std::string downstream_corpus = "downstream_corpus.txt";
  std::string ch_questions = "ch_questions.txt";
  std::string ch_answers = "ch_answers.txt";

  int stego_order = 2;
  double stego_k = 1e-3;
  int target_order = 32;
  double target_k = 1e-3;

  std::size_t pairs_per_style = 10;
  std::string owner = "ACME-2025";
  std::string codec_key = "imf-owner-key";
  std::string ch_key = "ch-owner-key";
  std::string if_phrase = "ownership verified by the model author";
  std::size_t max_candidates = 200;

  pairgen::RefineOptions refine;

  std::size_t ratio = 5;
  double lambda = 0.0;  // 0 selects the calibrated value
  double mu = 0.0;      // 0 selects 10 * lambda
  double merge_alpha = 0.5;
  std::optional<std::size_t> match_length;

  std::size_t n_random = 500;
  std::size_t n_normal = 500;

  attacks::GriPolicy gri;

  /// The bundled defaults with base_dir pointing at the shipped data.
  static ExperimentConfig defaults();
  /// Unknown sections are ignored; missing keys keep their defaults.
  static ExperimentConfig from_json(const nlohmann::json& j, const std::string& base_dir);
  /// "default" loads the bundled config; otherwise a TOML/JSON file.
  static ExperimentConfig load(const std::string& path_or_default);
  nlohmann::json to_json() const;
  std::string hash() const;
  std::string resolve(const std::string& file) const;
};

/// Text data the harness runs on.
struct Fixtures {
  std::string domain_corpus;
  std::vector<RegularQa> regular_qa;
  std::string downstream_corpus;
  std::vector<std::string> ch_questions;
  std::vector<std::string> ch_answers;

  static Fixtures load(const ExperimentConfig& cfg);
};

/// Sentence-initial word pairs of `corpus`, in order, keeping the first for each
/// distinct second word.
std::vector<std::string> seed_contexts(const std::string& corpus);

model::NGramModel train_stego_model(const ExperimentConfig& cfg, const Fixtures& fx);

/// High-order model whose vocabulary also covers templates, regular QA and the
/// baseline banks, so injected text never maps to <unk> except for garbles.
model::NGramModel train_target_model(const ExperimentConfig& cfg, const Fixtures& fx);

struct ImfCandidates {
  std::vector<pairgen::FingerprintPair> pairs;  // in candidate order
  std::size_t accepted = 0;
};

/// Candidates 0..n-1: stego answer for "<owner>/<i>" after seed context i,
/// drafted with template i and refined against `target`.
ImfCandidates imf_candidates(const model::NGramModel& stego, const model::NGramModel& target,
                             const ExperimentConfig& cfg, const Fixtures& fx, std::size_t n,
                             const pairgen::Refiner& refiner, const pairgen::RefineOptions& options);

/// The first `count` accepted candidates. Throws TrainingError if max_candidates
/// are used up first.
std::vector<pairgen::FingerprintPair> imf_pairs(const model::NGramModel& stego, const model::NGramModel& target,
                                                const ExperimentConfig& cfg, const Fixtures& fx,
                                                const pairgen::Refiner& refiner);
std::vector<pairgen::FingerprintPair> if_pairs(const ExperimentConfig& cfg);
std::vector<pairgen::FingerprintPair> ch_pairs(const ExperimentConfig& cfg, const Fixtures& fx);

/// Seed of the poison-set selection and shuffle.
std::uint64_t poison_seed(const ExperimentConfig& cfg);

/// Smallest 10^e, e in 0..9, at which injecting `poison` makes every
/// fingerprint's FSR 100%. Throws TrainingError if none does.
double calibrate_lambda(const model::NGramModel& base, const PoisonSet& poison, const MatchRule& rule);

inline const std::vector<std::string>& condition_names() {
  static const std::vector<std::string> names{"original", "ft", "gri", "ft_gri", "merge"};
  return names;
}

struct EvalReport {
  nlohmann::json config;
  std::string config_hash;
  double lambda = 0.0;
  double mu = 0.0;
  std::map<std::string, std::string> model_hashes;
  // style -> condition -> rate
  std::map<std::string, std::map<std::string, Rate>> fsr;
  std::map<std::string, TriggerRates> triggers;
  std::vector<pairgen::FingerprintPair> pairs;

  nlohmann::json to_json() const;
  std::string to_markdown() const;
  std::string to_csv() const;
};

/// Everything the protocol builds before querying.
struct ExperimentState {
  Fixtures fixtures;
  model::NGramModel stego;
  model::NGramModel target;
  std::map<std::string, std::vector<pairgen::FingerprintPair>> pairs;  // by style name
  PoisonSet poison;
  double lambda = 0.0;
  double mu = 0.0;
  model::NGramModel injected;
  model::NGramModel finetuned;
  model::NGramModel merged;
};

/// Trains, generates pairs per style, injects one mixed poison set and applies
/// the model-level attacks. `refiner` defaults to the builtin one.
ExperimentState prepare_experiment(const ExperimentConfig& cfg, const pairgen::Refiner* refiner = nullptr);

/// Query functions per condition over `state`'s models. The returned functions
/// reference `state` and `cfg`.
std::map<std::string, QueryFn> condition_queries(const ExperimentState& state, const ExperimentConfig& cfg);

/// The whole protocol: train, generate pairs per style, inject one mixed poison
/// set, attack, measure FSR and accidental triggers. Deterministic in cfg.
EvalReport run_experiment(const ExperimentConfig& cfg, const pairgen::Refiner* refiner = nullptr);

}  // namespace imf::eval
