#include "imf/eval/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <memory>
#include <set>
#include <sstream>

#include "imf/attacks/finetune.hpp"
#include "imf/common/config_file.hpp"
#include "imf/common/error.hpp"
#include "imf/common/hash.hpp"
#include "imf/model/tokenizer.hpp"
#include "imf/pairgen/baselines.hpp"
#include "imf/pairgen/prompt_draft.hpp"
#include "imf/pairgen/stego_answer.hpp"

namespace imf::eval {
namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("config", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::vector<std::string> out;
  std::istringstream in(read_text(path));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) out.push_back(line);
  }
  return out;
}

template <typename T>
void get(const nlohmann::json& j, const char* section, const char* key, T& out) {
  const nlohmann::json* node = &j;
  if (section) {
    if (!j.contains(section)) return;
    node = &j.at(section);
  }
  if (!node->contains(key)) return;
  try {
    out = node->at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("config", std::string(section ? section : "") + "." + key + ": " + e.what());
  }
}

void append_words(std::vector<std::string>& out, std::string_view text) {
  for (std::string& w : model::normalize_words(text)) out.push_back(std::move(w));
}

std::string fmt_rate(const Rate& r) {
  const auto p = r.percent();
  if (!p) return "n/a";
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(1);
  s << *p << "% (" << r.hits << "/" << r.total << ")";
  return s.str();
}

std::string csv_percent(const Rate& r) {
  const auto p = r.percent();
  if (!p) return "";
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(4);
  s << *p;
  return s.str();
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig c;
  c.base_dir = IMF_DATA_DIR;
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, const std::string& base_dir) {
  if (!j.is_object()) throw FormatError("config", "experiment config must be a table/object");
  ExperimentConfig c;
  c.base_dir = base_dir;
  get(j, nullptr, "seed", c.seed);
  get(j, "data", "domain_corpus", c.domain_corpus);
  get(j, "data", "regular_qa", c.regular_qa);
  get(j, "data", "downstream_corpus", c.downstream_corpus);
  get(j, "data", "ch_questions", c.ch_questions);
  get(j, "data", "ch_answers", c.ch_answers);
  get(j, "model", "stego_order", c.stego_order);
  get(j, "model", "stego_k", c.stego_k);
  get(j, "model", "target_order", c.target_order);
  get(j, "model", "target_k", c.target_k);
  get(j, "pairs", "per_style", c.pairs_per_style);
  get(j, "pairs", "owner", c.owner);
  get(j, "pairs", "codec_key", c.codec_key);
  get(j, "pairs", "ch_key", c.ch_key);
  get(j, "pairs", "if_phrase", c.if_phrase);
  get(j, "pairs", "max_candidates", c.max_candidates);
  get(j, "refine", "iterations", c.refine.max_iterations);
  get(j, "refine", "delta_low", c.refine.delta_low);
  get(j, "refine", "delta_high", c.refine.delta_high);
  get(j, "inject", "ratio", c.ratio);
  get(j, "inject", "lambda", c.lambda);
  get(j, "attacks", "mu", c.mu);
  get(j, "attacks", "merge_alpha", c.merge_alpha);
  std::size_t match = 0;
  get(j, "eval", "match_length", match);
  if (match > 0) c.match_length = match;
  get(j, "eval", "n_random", c.n_random);
  get(j, "eval", "n_normal", c.n_normal);
  if (j.contains("gri")) c.gri = attacks::GriPolicy::from_json(j.at("gri"));
  if (c.pairs_per_style == 0) throw ParameterError("config", "pairs.per_style must be positive");
  if (c.lambda < 0.0 || c.mu < 0.0) throw ParameterError("config", "lambda and mu must be non-negative");
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path_or_default) {
  const std::filesystem::path path =
      path_or_default == "default" ? std::filesystem::path(IMF_DATA_DIR) / "default.toml" : std::filesystem::path(path_or_default);
  return from_json(load_config_file(path), path.parent_path().string());
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["data"] = {{"domain_corpus", domain_corpus},
               {"regular_qa", regular_qa},
               {"downstream_corpus", downstream_corpus},
               {"ch_questions", ch_questions},
               {"ch_answers", ch_answers}};
  j["model"] = {{"stego_order", stego_order},
                {"stego_k", stego_k},
                {"target_order", target_order},
                {"target_k", target_k}};
  j["pairs"] = {{"per_style", pairs_per_style}, {"owner", owner},       {"codec_key", codec_key},
                {"ch_key", ch_key},             {"if_phrase", if_phrase}, {"max_candidates", max_candidates}};
  j["refine"] = {{"iterations", refine.max_iterations},
                 {"delta_low", refine.delta_low},
                 {"delta_high", refine.delta_high}};
  j["inject"] = {{"ratio", ratio}, {"lambda", lambda}};
  j["attacks"] = {{"mu", mu}, {"merge_alpha", merge_alpha}};
  j["eval"] = {{"match_length", match_length.value_or(0)}, {"n_random", n_random}, {"n_normal", n_normal}};
  j["gri"] = gri.to_json();
  return j;
}

std::string ExperimentConfig::hash() const { return config_hash(to_json()); }

std::string ExperimentConfig::resolve(const std::string& file) const {
  const std::filesystem::path p(file);
  return p.is_absolute() || base_dir.empty() ? p.string() : (std::filesystem::path(base_dir) / p).string();
}

Fixtures Fixtures::load(const ExperimentConfig& cfg) {
  Fixtures fx;
  fx.domain_corpus = read_text(cfg.resolve(cfg.domain_corpus));
  fx.regular_qa = load_regular_qa(cfg.resolve(cfg.regular_qa));
  fx.downstream_corpus = read_text(cfg.resolve(cfg.downstream_corpus));
  fx.ch_questions = read_lines(cfg.resolve(cfg.ch_questions));
  fx.ch_answers = read_lines(cfg.resolve(cfg.ch_answers));
  return fx;
}

std::vector<std::string> seed_contexts(const std::string& corpus) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& sentence : model::split_sentences(corpus)) {
    if (sentence.size() < 3) continue;
    if (!seen.insert(sentence[1]).second) continue;
    out.push_back(sentence[0] + " " + sentence[1]);
  }
  return out;
}

model::NGramModel train_stego_model(const ExperimentConfig& cfg, const Fixtures& fx) {
  model::TrainOptions o;
  o.order = cfg.stego_order;
  o.k = cfg.stego_k;
  return model::train(fx.domain_corpus, o);
}

model::NGramModel train_target_model(const ExperimentConfig& cfg, const Fixtures& fx) {
  model::TrainOptions o;
  o.order = cfg.target_order;
  o.k = cfg.target_k;
  o.extra_vocabulary = pairgen::template_lexicon();
  for (const RegularQa& qa : fx.regular_qa) {
    append_words(o.extra_vocabulary, qa.question);
    append_words(o.extra_vocabulary, qa.answer);
  }
  for (const std::string& q : fx.ch_questions) append_words(o.extra_vocabulary, q);
  for (const std::string& a : fx.ch_answers) append_words(o.extra_vocabulary, a);
  append_words(o.extra_vocabulary, cfg.if_phrase);
  return model::train(fx.domain_corpus, o);
}

namespace {

pairgen::FingerprintPair imf_candidate(const model::NGramModel& stego, const model::NGramModel& target,
                                       const ExperimentConfig& cfg, const std::vector<std::string>& seeds,
                                       std::size_t i, const pairgen::Refiner& refiner,
                                       const pairgen::RefineOptions& options) {
  const std::string& seed = seeds[i % seeds.size()];
  const std::string y = pairgen::generate_y(stego, cfg.owner + "/" + std::to_string(i), codec::CodecKey(cfg.codec_key), seed);
  pairgen::FingerprintPair p = pairgen::refine_pair(target, y, pairgen::draft_x0(y, i), refiner, options);
  p.seed_context = seed;
  return p;
}

std::vector<std::string> checked_seeds(const Fixtures& fx) {
  std::vector<std::string> seeds = seed_contexts(fx.domain_corpus);
  if (seeds.empty()) throw TrainingError("pairgen", "domain corpus has no usable seed contexts");
  return seeds;
}

}  // namespace

ImfCandidates imf_candidates(const model::NGramModel& stego, const model::NGramModel& target,
                             const ExperimentConfig& cfg, const Fixtures& fx, std::size_t n,
                             const pairgen::Refiner& refiner, const pairgen::RefineOptions& options) {
  const std::vector<std::string> seeds = checked_seeds(fx);
  ImfCandidates out;
  for (std::size_t i = 0; i < n; ++i) {
    out.pairs.push_back(imf_candidate(stego, target, cfg, seeds, i, refiner, options));
    if (out.pairs.back().accepted) ++out.accepted;
  }
  return out;
}

std::vector<pairgen::FingerprintPair> imf_pairs(const model::NGramModel& stego, const model::NGramModel& target,
                                                const ExperimentConfig& cfg, const Fixtures& fx,
                                                const pairgen::Refiner& refiner) {
  const std::vector<std::string> seeds = checked_seeds(fx);
  std::vector<pairgen::FingerprintPair> out;
  for (std::size_t i = 0; i < cfg.max_candidates && out.size() < cfg.pairs_per_style; ++i) {
    pairgen::FingerprintPair p = imf_candidate(stego, target, cfg, seeds, i, refiner, cfg.refine);
    if (p.accepted) out.push_back(std::move(p));
  }
  if (out.size() < cfg.pairs_per_style) {
    throw TrainingError("pairgen", "only " + std::to_string(out.size()) + " of " +
                                       std::to_string(cfg.pairs_per_style) + " imf pairs accepted within " +
                                       std::to_string(cfg.max_candidates) + " candidates");
  }
  return out;
}

std::vector<pairgen::FingerprintPair> if_pairs(const ExperimentConfig& cfg) {
  std::vector<pairgen::FingerprintPair> out;
  for (std::size_t i = 0; i < cfg.pairs_per_style; ++i) {
    out.push_back(pairgen::make_if_style(derive_seed(std::to_string(cfg.seed) + "/" + std::to_string(i), "imf/if"),
                                         cfg.if_phrase));
  }
  return out;
}

std::vector<pairgen::FingerprintPair> ch_pairs(const ExperimentConfig& cfg, const Fixtures& fx) {
  if (fx.ch_questions.size() < cfg.pairs_per_style) {
    throw ParameterError("pairgen", "question bank smaller than pairs.per_style");
  }
  std::vector<pairgen::FingerprintPair> out;
  for (std::size_t i = 0; i < cfg.pairs_per_style; ++i) {
    out.push_back(pairgen::make_ch_style(fx.ch_questions, fx.ch_answers, cfg.ch_key, i));
  }
  return out;
}

std::uint64_t poison_seed(const ExperimentConfig& cfg) {
  return derive_seed(std::to_string(cfg.seed), "imf/poison");
}

double calibrate_lambda(const model::NGramModel& base, const PoisonSet& poison, const MatchRule& rule) {
  const std::vector<model::TextPair> training = poison.training_pairs();
  for (int e = 0; e <= 9; ++e) {
    const double lambda = std::pow(10.0, e);
    const model::NGramModel injected = model::inject(base, training, lambda);
    if (fsr(greedy_query(injected), poison.fingerprints, injected.vocab(), rule).hits == poison.fingerprints.size()) {
      return lambda;
    }
  }
  throw TrainingError("inject", "no injection strength up to 1e9 reaches full FSR");
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["config"] = config;
  j["config_hash"] = config_hash;
  j["lambda"] = lambda;
  j["mu"] = mu;
  j["model_hashes"] = model_hashes;
  for (const auto& [style, cells] : fsr) {
    for (const auto& [cond, rate] : cells) j["fsr"][style][cond] = rate.to_json();
  }
  for (const auto& [style, t] : triggers) {
    j["accidental_triggers"][style] = {{"random_character", t.random_character.to_json()},
                                       {"normal_query", t.normal_query.to_json()}};
  }
  j["pairs"] = nlohmann::json::array();
  for (const auto& p : pairs) j["pairs"].push_back(nlohmann::json::parse(pairgen::to_jsonl_line(p)));
  return j;
}

std::string EvalReport::to_markdown() const {
  std::ostringstream s;
  s << "# Fingerprint success rate\n\n";
  s << "config `" << config_hash << "`, lambda " << lambda << ", mu " << mu << "\n\n";
  s << "| style |";
  for (const auto& c : condition_names()) s << ' ' << c << " |";
  s << "\n|---|";
  for (std::size_t i = 0; i < condition_names().size(); ++i) s << "---|";
  s << '\n';
  for (const auto& [style, cells] : fsr) {
    s << "| " << style << " |";
    for (const auto& c : condition_names()) {
      const auto it = cells.find(c);
      s << ' ' << (it == cells.end() ? "n/a" : fmt_rate(it->second)) << " |";
    }
    s << '\n';
  }
  s << "\n# Accidental triggers\n\n| style | random character | normal query |\n|---|---|---|\n";
  for (const auto& [style, t] : triggers) {
    s << "| " << style << " | " << fmt_rate(t.random_character) << " | " << fmt_rate(t.normal_query) << " |\n";
  }
  s << "\n# Models\n\n";
  for (const auto& [name, hash] : model_hashes) s << "- " << name << ": `" << hash << "`\n";
  return s.str();
}

std::string EvalReport::to_csv() const {
  std::ostringstream s;
  s << "kind,style,condition,hits,total,percent\n";
  for (const auto& [style, cells] : fsr) {
    for (const auto& c : condition_names()) {
      const auto it = cells.find(c);
      if (it == cells.end()) continue;
      s << "fsr," << style << ',' << c << ',' << it->second.hits << ',' << it->second.total << ','
        << csv_percent(it->second) << '\n';
    }
  }
  for (const auto& [style, t] : triggers) {
    s << "trigger," << style << ",random_character," << t.random_character.hits << ',' << t.random_character.total
      << ',' << csv_percent(t.random_character) << '\n';
    s << "trigger," << style << ",normal_query," << t.normal_query.hits << ',' << t.normal_query.total << ','
      << csv_percent(t.normal_query) << '\n';
  }
  return s.str();
}

ExperimentState prepare_experiment(const ExperimentConfig& cfg, const pairgen::Refiner* refiner) {
  Fixtures fx = Fixtures::load(cfg);
  model::NGramModel stego = train_stego_model(cfg, fx);
  model::NGramModel target = train_target_model(cfg, fx);
  const pairgen::BuiltinRefiner builtin(cfg.refine.delta_low, cfg.refine.delta_high);

  std::map<std::string, std::vector<pairgen::FingerprintPair>> by_style;
  by_style["imf"] = imf_pairs(stego, target, cfg, fx, refiner ? *refiner : builtin);
  by_style["if_style"] = if_pairs(cfg);
  by_style["ch_style"] = ch_pairs(cfg, fx);
  std::vector<pairgen::FingerprintPair> all;
  for (const char* style : {"imf", "if_style", "ch_style"}) {
    all.insert(all.end(), by_style[style].begin(), by_style[style].end());
  }
  PoisonSet poison = build_poison_set(all, fx.regular_qa, cfg.ratio, poison_seed(cfg));

  const double lambda = cfg.lambda > 0.0 ? cfg.lambda : calibrate_lambda(target, poison, MatchRule{cfg.match_length});
  const double mu = cfg.mu > 0.0 ? cfg.mu : 10.0 * lambda;
  model::NGramModel injected = model::inject(target, poison.training_pairs(), lambda);
  model::NGramModel finetuned = attacks::finetune_attack(injected, fx.downstream_corpus, mu);
  model::NGramModel merged = model::merge(injected, target, cfg.merge_alpha);
  return ExperimentState{std::move(fx),      std::move(stego),    std::move(target),    std::move(by_style),
                         std::move(poison),  lambda,              mu,                   std::move(injected),
                         std::move(finetuned), std::move(merged)};
}

std::map<std::string, QueryFn> condition_queries(const ExperimentState& state, const ExperimentConfig& cfg) {
  // The masked references are shared by every query of a condition.
  auto injected_clean = std::make_shared<const model::NGramModel>(state.injected.without_bonus());
  auto tuned_clean = std::make_shared<const model::NGramModel>(state.finetuned.without_bonus());
  auto gri_query = [&cfg](const model::NGramModel& m, std::shared_ptr<const model::NGramModel> clean) -> QueryFn {
    return [&m, clean, &cfg](const std::string& prompt, int max_len) {
      return attacks::gri_attack(m, prompt, cfg.gri, max_len, clean.get()).final_output;
    };
  };
  return {{"original", greedy_query(state.injected)},
          {"ft", greedy_query(state.finetuned)},
          {"gri", gri_query(state.injected, injected_clean)},
          {"ft_gri", gri_query(state.finetuned, tuned_clean)},
          {"merge", greedy_query(state.merged)}};
}

EvalReport run_experiment(const ExperimentConfig& cfg, const pairgen::Refiner* refiner) {
  const ExperimentState state = prepare_experiment(cfg, refiner);
  const MatchRule rule{cfg.match_length};

  EvalReport report;
  report.config = cfg.to_json();
  report.config_hash = cfg.hash();
  report.lambda = state.lambda;
  report.mu = state.mu;
  for (const char* style : {"imf", "if_style", "ch_style"}) {
    const auto& p = state.pairs.at(style);
    report.pairs.insert(report.pairs.end(), p.begin(), p.end());
  }
  report.model_hashes = {{"stego", state.stego.content_hash()},
                         {"target", state.target.content_hash()},
                         {"injected", state.injected.content_hash()},
                         {"finetuned", state.finetuned.content_hash()},
                         {"merged", state.merged.content_hash()}};

  const std::map<std::string, QueryFn> queries = condition_queries(state, cfg);
  std::vector<std::string> normal;
  for (const RegularQa& qa : state.poison.held_out) normal.push_back(qa.question);
  if (normal.empty()) {
    for (const RegularQa& qa : state.fixtures.regular_qa) normal.push_back(qa.question);
  }

  // Cells only read the shared models, so styles evaluate concurrently.
  std::map<std::string, std::future<std::pair<std::map<std::string, Rate>, TriggerRates>>> jobs;
  for (const auto& [style, pairs] : state.pairs) {
    jobs[style] = std::async(std::launch::async, [&, &pairs = pairs, style = style] {
      std::map<std::string, Rate> cells;
      for (const auto& [cond, query] : queries) cells[cond] = fsr(query, pairs, state.injected.vocab(), rule);
      const TriggerRates t = accidental_trigger_probe(greedy_query(state.injected), pairs, normal,
                                                      state.injected.vocab(), cfg.n_random, cfg.n_normal,
                                                      derive_seed(std::to_string(cfg.seed), "imf/probe/" + style),
                                                      rule);
      return std::make_pair(std::move(cells), t);
    });
  }
  for (auto& [style, job] : jobs) {
    auto [cells, t] = job.get();
    report.fsr[style] = std::move(cells);
    report.triggers[style] = t;
  }
  return report;
}

}  // namespace imf::eval
