// imf: command-line front end for training, stego answers, fingerprint pairs,
// injection, attacks and evaluation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "imf/attacks/finetune.hpp"
#include "imf/attacks/gri.hpp"
#include "imf/codec/audit.hpp"
#include "imf/codec/stego.hpp"
#include "imf/common/config_file.hpp"
#include "imf/common/error.hpp"
#include "imf/eval/experiment.hpp"
#include "imf/model/model_io.hpp"
#include "imf/model/tokenizer.hpp"
#include "imf/pairgen/baselines.hpp"
#include "imf/remote/remote_refiner.hpp"

namespace {

using imf::model::NGramModel;
using nlohmann::json;

constexpr std::string_view kStegoFormat = "imf-stego/1";

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config = "default";
  std::string model_file;
};

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw imf::FormatError("io", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& data) {
  if (path.empty() || path == "-") {
    std::cout << data;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw imf::FormatError("io", "cannot write " + path);
  out << data;
}

imf::eval::ExperimentConfig load_config(const Globals& g) {
  auto cfg = imf::eval::ExperimentConfig::load(g.config);
  if (g.seed) cfg.seed = *g.seed;
  return cfg;
}

json raw_config(const Globals& g) {
  return g.config == "default"
             ? imf::load_config_file(std::filesystem::path(IMF_DATA_DIR) / "default.toml")
             : imf::load_config_file(g.config);
}

NGramModel require_model(const Globals& g) {
  if (g.model_file.empty()) throw imf::ParameterError("cli", "--model-file is required for this command");
  return imf::model::load_model_file(g.model_file);
}

std::vector<imf::pairgen::FingerprintPair> read_pairs(const std::string& path) {
  std::istringstream in(read_input(path));
  return imf::pairgen::read_jsonl(in);
}

std::vector<std::uint8_t> payload_bytes(const std::string& text, const std::string& hex, const std::string& b64) {
  if (!hex.empty()) return imf::codec::hex_decode(hex);
  if (!b64.empty()) return imf::codec::base64_decode(b64);
  return {text.begin(), text.end()};
}

imf::model::TokenSeq context_tokens(const NGramModel& m, const std::string& context) {
  imf::model::TokenSeq ctx{imf::model::Vocabulary::kBos};
  const auto words = imf::model::encode_words(context, m.vocab());
  ctx.insert(ctx.end(), words.begin(), words.end());
  return ctx;
}

std::string outcomes_jsonl(const std::vector<imf::attacks::AttackOutcome>& outcomes) {
  std::string out;
  for (const auto& o : outcomes) out += o.to_json().dump() + "\n";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stego fingerprint toolkit: embed ownership in text, build and inject fingerprint pairs, "
               "and measure them under attack."};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Overrides the configured seed");
  app.add_option("--config", g.config, "Experiment config (TOML or JSON), or 'default'");
  app.add_option("--model-file", g.model_file, "Model file read or written by the command");

  std::function<void()> action;

  // train
  auto* train = app.add_subcommand("train", "Train an n-gram model and write it to --model-file");
  std::string corpus_path, extra_vocab_path, role;
  int order = 2;
  double k = 1e-3;
  train->add_option("--corpus", corpus_path, "Training text (one sentence per line or running text)");
  train->add_option("--order", order, "n-gram order")->capture_default_str();
  train->add_option("--k", k, "Add-k smoothing constant")->capture_default_str();
  train->add_option("--extra-vocab", extra_vocab_path, "File of additional vocabulary words");
  train->add_option("--role", role, "Train the configured 'stego' or 'target' model instead of --corpus")
      ->check(CLI::IsMember({"stego", "target"}));
  train->callback([&] {
    action = [&] {
      if (g.model_file.empty()) throw imf::ParameterError("cli", "--model-file is required");
      std::optional<NGramModel> m;
      if (!role.empty()) {
        const auto cfg = load_config(g);
        const auto fx = imf::eval::Fixtures::load(cfg);
        m = role == "stego" ? imf::eval::train_stego_model(cfg, fx) : imf::eval::train_target_model(cfg, fx);
      } else {
        if (corpus_path.empty()) throw imf::ParameterError("cli", "--corpus or --role is required");
        imf::model::TrainOptions o{order, k, {}};
        if (!extra_vocab_path.empty()) o.extra_vocabulary = imf::model::normalize_words(read_input(extra_vocab_path));
        m = imf::model::train(read_input(corpus_path), o);
      }
      imf::model::save_model_file(*m, g.model_file);
      std::cout << m->content_hash() << '\n';
    };
  });

  // embed
  auto* embed = app.add_subcommand("embed", "Hide a payload in generated text");
  std::string payload, payload_hex, payload_b64, key, context = "the river", out_path;
  int max_len = 400;
  auto* p_text = embed->add_option("--payload", payload, "Payload text");
  auto* p_hex = embed->add_option("--payload-hex", payload_hex, "Payload as hex");
  auto* p_b64 = embed->add_option("--payload-base64", payload_b64, "Payload as base64");
  p_text->excludes(p_hex)->excludes(p_b64);
  p_hex->excludes(p_b64);
  embed->add_option("--key", key, "Shared codec key")->required();
  embed->add_option("--context", context, "Cover context the text continues")->capture_default_str();
  embed->add_option("--max-len", max_len, "Token budget")->capture_default_str();
  embed->add_option("--out", out_path, "Envelope file (stdout if omitted)");
  embed->callback([&] {
    action = [&] {
      const NGramModel m = require_model(g);
      const auto bytes = payload_bytes(payload, payload_hex, payload_b64);
      const auto ctx = context_tokens(m, context);
      const auto result = imf::codec::embed(m, ctx, imf::codec::BitMessage::from_bytes(bytes),
                                            imf::codec::CodecKey(key), max_len);
      const json env = {{"format", kStegoFormat},
                        {"model_hash", m.content_hash()},
                        {"context", context},
                        {"text", imf::model::detokenize(result.tokens, m.vocab())}};
      write_output(out_path, env.dump(2) + "\n");
    };
  });

  // extract
  auto* extract = app.add_subcommand("extract", "Recover a payload from a stego envelope");
  std::string in_path = "-", format = "text";
  extract->add_option("--in", in_path, "Envelope file, '-' for stdin")->capture_default_str();
  extract->add_option("--key", key, "Shared codec key")->required();
  extract->add_option("--format", format, "Payload output format")
      ->check(CLI::IsMember({"text", "hex", "base64"}))
      ->capture_default_str();
  extract->callback([&] {
    action = [&] {
      const NGramModel m = require_model(g);
      const json env = json::parse(read_input(in_path), nullptr, false);
      if (env.is_discarded() || env.value("format", "") != kStegoFormat || !env.contains("text") ||
          !env.contains("model_hash") || !env.contains("context")) {
        throw imf::FormatError("extract", "not an imf-stego/1 envelope");
      }
      auto stego = imf::model::encode_words(env["text"].get<std::string>(), m.vocab());
      stego.push_back(imf::model::Vocabulary::kEos);
      const auto message = imf::codec::extract(m, context_tokens(m, env["context"].get<std::string>()), stego,
                                               imf::codec::CodecKey(key), env["model_hash"].get<std::string>());
      const auto bytes = message.bytes();
      if (format == "hex") {
        std::cout << imf::codec::hex_encode(bytes) << '\n';
      } else if (format == "base64") {
        std::cout << imf::codec::base64_encode(bytes) << '\n';
      } else {
        std::cout << std::string(bytes.begin(), bytes.end()) << '\n';
      }
    };
  });

  // audit
  auto* audit = app.add_subcommand("audit", "Compare embedder output frequencies with the model distribution");
  std::uint64_t trials = 100000;
  std::string audit_payload = "random";
  audit->add_option("--context", context, "Context to audit")->capture_default_str();
  audit->add_option("--trials", trials, "Number of embeddings")->capture_default_str();
  audit->add_option("--payload", audit_payload, "Payload bits")
      ->check(CLI::IsMember({"random", "zero"}))
      ->capture_default_str();
  audit->callback([&] {
    action = [&] {
      const NGramModel m = require_model(g);
      imf::codec::AuditOptions o;
      o.trials = trials;
      o.seed = g.seed.value_or(0);
      o.payload = audit_payload == "zero" ? imf::codec::AuditPayload::AllZero : imf::codec::AuditPayload::Random;
      std::cout << imf::codec::security_audit(m, context_tokens(m, context), o).to_json() << '\n';
    };
  });

  // genpair
  auto* genpair = app.add_subcommand("genpair", "Generate fingerprint pairs as JSONL");
  std::string style = "imf";
  std::size_t count = 0;
  genpair->add_option("--style", style, "Pair style")
      ->check(CLI::IsMember({"imf", "if_style", "ch_style", "all"}))
      ->capture_default_str();
  genpair->add_option("--count", count, "Pairs per style (config value if omitted)");
  genpair->add_option("--out", out_path, "JSONL file (stdout if omitted)");
  genpair->callback([&] {
    action = [&] {
      auto cfg = load_config(g);
      if (count > 0) cfg.pairs_per_style = count;
      const auto fx = imf::eval::Fixtures::load(cfg);
      std::vector<imf::pairgen::FingerprintPair> pairs;
      if (style == "imf" || style == "all") {
        const auto stego = imf::eval::train_stego_model(cfg, fx);
        const auto target = imf::eval::train_target_model(cfg, fx);
        const imf::pairgen::BuiltinRefiner builtin(cfg.refine.delta_low, cfg.refine.delta_high);
        std::unique_ptr<imf::pairgen::Refiner> remote;
        const json raw = raw_config(g);
        if (raw.contains("remote")) {
          if (auto rc = imf::remote::RemoteRefinerConfig::from_json(raw["remote"])) {
            remote = std::make_unique<imf::remote::RemoteRefiner>(*rc, builtin);
          }
        }
        const auto imf_pairs = imf::eval::imf_pairs(stego, target, cfg, fx, remote ? *remote : static_cast<const imf::pairgen::Refiner&>(builtin));
        pairs.insert(pairs.end(), imf_pairs.begin(), imf_pairs.end());
      }
      if (style == "if_style" || style == "all") {
        const auto p = imf::eval::if_pairs(cfg);
        pairs.insert(pairs.end(), p.begin(), p.end());
      }
      if (style == "ch_style" || style == "all") {
        const auto p = imf::eval::ch_pairs(cfg, fx);
        pairs.insert(pairs.end(), p.begin(), p.end());
      }
      std::ostringstream s;
      imf::pairgen::write_jsonl(s, pairs);
      write_output(out_path, s.str());
    };
  });

  // inject
  auto* inject = app.add_subcommand("inject", "Inject pairs plus regular QA into a model");
  std::string pairs_path;
  double lambda = 0.0;
  std::optional<std::size_t> ratio;
  inject->add_option("--pairs", pairs_path, "Pairs JSONL")->required();
  inject->add_option("--lambda", lambda, "Injection strength (calibrated if omitted)");
  inject->add_option("--ratio", ratio, "Regular instances per pair (config value if omitted)");
  inject->add_option("--out", out_path, "Injected model file")->required();
  inject->callback([&] {
    action = [&] {
      const auto cfg = load_config(g);
      const auto fx = imf::eval::Fixtures::load(cfg);
      const NGramModel base =
          g.model_file.empty() ? imf::eval::train_target_model(cfg, fx) : imf::model::load_model_file(g.model_file);
      const auto poison = imf::eval::build_poison_set(read_pairs(pairs_path), fx.regular_qa, ratio.value_or(cfg.ratio),
                                                      imf::eval::poison_seed(cfg));
      const double strength = lambda > 0.0 ? lambda : imf::eval::calibrate_lambda(base, poison, {cfg.match_length});
      const NGramModel injected = imf::model::inject(base, poison.training_pairs(), strength);
      imf::model::save_model_file(injected, out_path);
      std::cout << json{{"lambda", strength}, {"model_hash", injected.content_hash()}}.dump() << '\n';
    };
  });

  // attack
  auto* attack = app.add_subcommand("attack", "Apply an attack");
  attack->require_subcommand(1);
  std::string policy_path, prompt, downstream_path, other_path;
  double mu = 0.0, alpha = 0.5;
  int response_len = 64;

  auto policy_of = [&](const imf::eval::ExperimentConfig& cfg) {
    return policy_path.empty() ? cfg.gri : imf::attacks::GriPolicy::load(policy_path);
  };
  // One outcome per pair (response length |y|) or for a single --prompt.
  auto run_gri = [&](const NGramModel& m, const imf::attacks::GriPolicy& policy) {
    std::vector<imf::attacks::AttackOutcome> outcomes;
    const NGramModel clean = m.without_bonus();
    if (!prompt.empty()) outcomes.push_back(imf::attacks::gri_attack(m, prompt, policy, response_len, &clean));
    if (!pairs_path.empty()) {
      for (const auto& p : read_pairs(pairs_path)) {
        const int len = static_cast<int>(imf::model::encode_words(p.y, m.vocab()).size());
        outcomes.push_back(imf::attacks::gri_attack(m, p.prompt(), policy, std::max(len, 1), &clean));
      }
    }
    if (outcomes.empty()) throw imf::ParameterError("cli", "give --prompt or --pairs");
    write_output(out_path, outcomes_jsonl(outcomes));
  };
  auto add_query_opts = [&](CLI::App* sub) {
    sub->add_option("--pairs", pairs_path, "Pairs JSONL to query");
    sub->add_option("--prompt", prompt, "Single prompt to query");
    sub->add_option("--policy", policy_path, "GRI policy file (config [gri] if omitted)");
    sub->add_option("--max-len", response_len, "Response length for --prompt")->capture_default_str();
    sub->add_option("--out", out_path, "JSONL outcomes (stdout if omitted)");
  };
  auto downstream_of = [&](const imf::eval::ExperimentConfig& cfg) {
    return read_input(downstream_path.empty() ? cfg.resolve(cfg.downstream_corpus) : downstream_path);
  };

  auto* gri = attack->add_subcommand("gri", "Generation revision intervention (inference only)");
  add_query_opts(gri);
  gri->callback([&] {
    action = [&] {
      const auto cfg = load_config(g);
      run_gri(require_model(g), policy_of(cfg));
    };
  });

  auto* ft = attack->add_subcommand("ft", "Fine-tune on a downstream corpus");
  ft->add_option("--corpus", downstream_path, "Downstream corpus (config value if omitted)");
  ft->add_option("--mu", mu, "Fine-tuning strength")->required();
  ft->add_option("--out", out_path, "Fine-tuned model file")->required();
  ft->callback([&] {
    action = [&] {
      const auto cfg = load_config(g);
      const NGramModel tuned = imf::attacks::finetune_attack(require_model(g), downstream_of(cfg), mu);
      imf::model::save_model_file(tuned, out_path);
      std::cout << tuned.content_hash() << '\n';
    };
  });

  auto* mg = attack->add_subcommand("merge", "Average with another model");
  mg->add_option("--other", other_path, "Model to merge with")->required();
  mg->add_option("--alpha", alpha, "Weight of --model-file")->capture_default_str();
  mg->add_option("--out", out_path, "Merged model file")->required();
  mg->callback([&] {
    action = [&] {
      const NGramModel merged = imf::model::merge(require_model(g), imf::model::load_model_file(other_path), alpha);
      imf::model::save_model_file(merged, out_path);
      std::cout << merged.content_hash() << '\n';
    };
  });

  auto* ftgri = attack->add_subcommand("ft-gri", "Fine-tune, then GRI");
  add_query_opts(ftgri);
  ftgri->add_option("--corpus", downstream_path, "Downstream corpus (config value if omitted)");
  ftgri->add_option("--mu", mu, "Fine-tuning strength")->required();
  ftgri->callback([&] {
    action = [&] {
      const auto cfg = load_config(g);
      run_gri(imf::attacks::finetune_attack(require_model(g), downstream_of(cfg), mu), policy_of(cfg));
    };
  });

  // eval
  auto* ev = app.add_subcommand("eval", "Run the full experiment and write reports");
  std::string out_dir = ".";
  ev->add_option("--out-dir", out_dir, "Directory for report.json, report.md, report.csv")->capture_default_str();
  ev->callback([&] {
    action = [&] {
      const auto cfg = load_config(g);
      const auto report = imf::eval::run_experiment(cfg);
      std::filesystem::create_directories(out_dir);
      const std::filesystem::path dir(out_dir);
      write_output((dir / "report.json").string(), report.to_json().dump(2) + "\n");
      write_output((dir / "report.md").string(), report.to_markdown());
      write_output((dir / "report.csv").string(), report.to_csv());
      std::cout << report.to_markdown();
    };
  });

  // export-jsonl
  auto* exp = app.add_subcommand("export-jsonl", "Write a poison set as instruction/output JSONL for external trainers");
  exp->add_option("--pairs", pairs_path, "Pairs JSONL")->required();
  exp->add_option("--ratio", ratio, "Regular instances per pair (config value if omitted)");
  exp->add_option("--out", out_path, "JSONL file (stdout if omitted)");
  exp->callback([&] {
    action = [&] {
      const auto cfg = load_config(g);
      const auto fx = imf::eval::Fixtures::load(cfg);
      const auto poison = imf::eval::build_poison_set(read_pairs(pairs_path), fx.regular_qa, ratio.value_or(cfg.ratio),
                                                      imf::eval::poison_seed(cfg));
      std::string out;
      for (const auto& tp : poison.training_pairs()) {
        json line;
        line["instruction"] = tp.x;
        line["input"] = "";
        line["output"] = tp.y;
        out += line.dump() + "\n";
      }
      write_output(out_path, out);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (action) action();
    return 0;
  } catch (const imf::IdentityError& e) {
    std::cerr << "[" << e.stage() << "] identity error: " << e.what() << '\n';
    return 3;
  } catch (const imf::Error& e) {
    std::cerr << "[" << e.stage() << "] error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "[cli] error: " << e.what() << '\n';
    return 1;
  }
}
