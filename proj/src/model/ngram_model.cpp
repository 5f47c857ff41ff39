#include "imf/model/ngram_model.hpp"

#include <algorithm>
#include <cmath>

#include "imf/common/error.hpp"
#include "imf/common/hash.hpp"
#include "imf/common/rng.hpp"
#include "imf/model/model_io.hpp"
#include "imf/model/tokenizer.hpp"

namespace imf::model {
namespace {

// Zero entries and empty rows are dropped so that "row present" always means
// "context seen with positive mass", which is what backoff tests for.
void prune(CountTable& table) {
  for (auto it = table.begin(); it != table.end();) {
    std::erase_if(it->second, [](const auto& kv) { return kv.second == 0.0; });
    it = it->second.empty() ? table.erase(it) : std::next(it);
  }
}

void validate(int order, const Vocabulary& vocab, const CountTable& table, const char* which) {
  for (const auto& [ctx, row] : table) {
    if (ctx.size() > static_cast<std::size_t>(order - 1)) {
      throw StructuralError("model", std::string(which) + ": context longer than order - 1");
    }
    for (TokenId t : ctx) {
      if (t >= vocab.size()) throw StructuralError("model", std::string(which) + ": context id out of range");
    }
    for (const auto& [id, value] : row) {
      if (id >= vocab.size() || id == Vocabulary::kBos) {
        throw StructuralError("model", std::string(which) + ": invalid predicted token id");
      }
      if (!(value >= 0.0) || !std::isfinite(value)) {
        throw StructuralError("model", std::string(which) + ": counts must be finite and nonnegative");
      }
    }
  }
}

double row_total(const CountRow& row) {
  double t = 0.0;
  for (const auto& [id, value] : row) t += value;
  return t;
}

// Adds one sequence's n-grams. With `longest_only`, position i contributes only at
// its longest window min(order - 1, i); otherwise at every length 0..that.
void accumulate(CountTable& table, const TokenSeq& seq, int order, double weight, bool longest_only) {
  for (std::size_t i = 1; i < seq.size(); ++i) {
    const std::size_t longest = std::min<std::size_t>(static_cast<std::size_t>(order - 1), i);
    const std::size_t shortest = longest_only ? longest : 0;
    for (std::size_t len = shortest; len <= longest; ++len) {
      Context ctx(seq.begin() + static_cast<std::ptrdiff_t>(i - len), seq.begin() + static_cast<std::ptrdiff_t>(i));
      table[std::move(ctx)][seq[i]] += weight;
    }
  }
}

CountTable blend(const CountTable& a, const CountTable& b, double alpha) {
  CountTable out = b;
  for (auto& [ctx, row] : out) {
    auto ait = a.find(ctx);
    for (auto& [id, value] : row) {
      double av = 0.0;
      if (ait != a.end()) {
        if (auto e = ait->second.find(id); e != ait->second.end()) av = e->second;
      }
      value = value + alpha * (av - value);
    }
  }
  for (const auto& [ctx, row] : a) {
    CountRow& orow = out[ctx];
    for (const auto& [id, value] : row) {
      if (!orow.contains(id)) orow[id] = alpha * value;  // b contributes 0 here
    }
  }
  for (auto& [ctx, row] : out) {
    for (auto& [id, value] : row) value = std::max(value, 0.0);
  }
  return out;
}

}  // namespace

NGramModel::NGramModel(int order, double k, Vocabulary vocab, CountTable counts, CountTable bonus)
    : order_(order), k_(k), vocab_(std::move(vocab)), counts_(std::move(counts)), bonus_(std::move(bonus)) {
  if (order_ < 2) throw ParameterError("model", "order must be at least 2");
  if (!(k_ > 0.0) || !std::isfinite(k_)) throw ParameterError("model", "smoothing constant k must be positive");
  validate(order_, vocab_, counts_, "counts");
  validate(order_, vocab_, bonus_, "bonus");
  prune(counts_);
  prune(bonus_);
  const std::string body = serialize_body(order_, k_, vocab_, counts_, bonus_);
  const Sha256Digest digest = sha256(body);
  hash_ = to_hex(digest);
}

Context NGramModel::backoff_context(std::span<const TokenId> history) const {
  const std::size_t longest = std::min<std::size_t>(static_cast<std::size_t>(order_ - 1), history.size());
  for (std::size_t len = longest; len > 0; --len) {
    Context ctx(history.end() - static_cast<std::ptrdiff_t>(len), history.end());
    if (counts_.contains(ctx)) return ctx;
  }
  return {};
}

TokenDistribution NGramModel::next_distribution(std::span<const TokenId> history) const {
  const Context ctx = backoff_context(history);
  static const CountRow kEmpty;
  auto it = counts_.find(ctx);
  const CountRow& row = it == counts_.end() ? kEmpty : it->second;

  const double denom = row_total(row) + k_ * static_cast<double>(support_size());
  const double tail_p = k_ / denom;

  std::vector<TokenProb> seen;
  seen.reserve(row.size());
  for (const auto& [id, c] : row) seen.push_back({id, (c + k_) / denom});
  std::sort(seen.begin(), seen.end(), canonical_before);

  // Unseen tokens all share tail_p, so their canonical order is ascending id.
  std::vector<TokenProb> tail;
  tail.reserve(support_size() - row.size());
  for (TokenId id = 0; id < vocab_.size(); ++id) {
    if (id != Vocabulary::kBos && !row.contains(id)) tail.push_back({id, tail_p});
  }

  std::vector<TokenProb> merged;
  merged.reserve(seen.size() + tail.size());
  std::merge(seen.begin(), seen.end(), tail.begin(), tail.end(), std::back_inserter(merged), canonical_before);
  return TokenDistribution::from_canonical(std::move(merged));
}

double NGramModel::conditional(std::span<const TokenId> history, TokenId token) const {
  if (token == Vocabulary::kBos || token >= vocab_.size()) return 0.0;
  const Context ctx = backoff_context(history);
  auto it = counts_.find(ctx);
  double total = 0.0;
  double c = 0.0;
  if (it != counts_.end()) {
    total = row_total(it->second);
    if (auto e = it->second.find(token); e != it->second.end()) c = e->second;
  }
  return (c + k_) / (total + k_ * static_cast<double>(support_size()));
}

double NGramModel::log_prob(std::span<const TokenId> sequence) const {
  double lp = 0.0;
  for (std::size_t i = 1; i < sequence.size(); ++i) lp += std::log(conditional(sequence.first(i), sequence[i]));
  return lp;
}

NGramModel NGramModel::without_bonus() const {
  CountTable masked = counts_;
  for (const auto& [ctx, row] : bonus_) {
    auto it = masked.find(ctx);
    if (it == masked.end()) continue;
    for (const auto& [id, value] : row) {
      auto e = it->second.find(id);
      if (e == it->second.end()) continue;
      const double rest = e->second - value;
      // Residue from rounding in blended tables is not a real count.
      e->second = rest > 1e-9 * std::max(1.0, e->second) ? rest : 0.0;
    }
  }
  return NGramModel(order_, k_, vocab_, std::move(masked));
}

NGramModel train_units(std::span<const std::string> units, const TrainOptions& options) {
  if (options.order < 2) throw ParameterError("train", "order must be at least 2");
  if (!(options.k > 0.0)) throw ParameterError("train", "smoothing constant k must be positive");
  std::vector<std::string> words;
  bool any = false;
  for (const std::string& u : units) {
    auto w = normalize_words(u);
    any = any || !w.empty();
    words.insert(words.end(), w.begin(), w.end());
  }
  if (!any) throw TrainingError("train", "training corpus is empty");
  std::vector<std::string> extra_words;
  for (const std::string& e : options.extra_vocabulary) {
    auto w = normalize_words(e);
    extra_words.insert(extra_words.end(), w.begin(), w.end());
  }
  words.insert(words.end(), extra_words.begin(), extra_words.end());
  Vocabulary vocab = Vocabulary::from_words(std::move(words));
  CountTable counts;
  for (const std::string& u : units) {
    TokenSeq seq = tokenize(u, vocab);
    if (seq.size() > 2) accumulate(counts, seq, options.order, 1.0, false);
  }
  return NGramModel(options.order, options.k, std::move(vocab), std::move(counts));
}

NGramModel train(std::string_view corpus, const TrainOptions& options) {
  std::vector<std::string> units;
  for (const auto& sentence : split_sentences(corpus)) {
    std::string u;
    for (const std::string& w : sentence) {
      if (!u.empty()) u.push_back(' ');
      u += w;
    }
    units.push_back(std::move(u));
  }
  return train_units(units, options);
}

TokenSeq pair_sequence(const TextPair& pair, const Vocabulary& vocab) {
  TokenSeq seq{Vocabulary::kBos};
  TokenSeq x = encode_words(pair.x, vocab);
  TokenSeq y = encode_words(pair.y, vocab);
  seq.insert(seq.end(), x.begin(), x.end());
  seq.insert(seq.end(), y.begin(), y.end());
  seq.push_back(Vocabulary::kEos);
  return seq;
}

NGramModel inject(const NGramModel& model, std::span<const TextPair> pairs, double strength) {
  if (!(strength >= 0.0) || !std::isfinite(strength)) throw ParameterError("inject", "strength must be >= 0");
  if (pairs.empty()) throw ParameterError("inject", "no pairs to inject");
  if (strength == 0.0) return model;
  CountTable counts = model.counts();
  CountTable bonus = model.bonus();
  for (const TextPair& p : pairs) {
    const TokenSeq seq = pair_sequence(p, model.vocab());
    accumulate(counts, seq, model.order(), strength, true);
    accumulate(bonus, seq, model.order(), strength, true);
  }
  return NGramModel(model.order(), model.k(), model.vocab(), std::move(counts), std::move(bonus));
}

NGramModel merge(const NGramModel& a, const NGramModel& b, double alpha) {
  if (!(a.vocab() == b.vocab())) throw StructuralError("merge", "models have different vocabularies");
  if (a.order() != b.order()) throw StructuralError("merge", "models have different orders");
  if (a.k() != b.k()) throw StructuralError("merge", "models have different smoothing constants");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("merge", "alpha must lie in [0, 1]");
  if (alpha == 1.0) return a;
  if (alpha == 0.0) return b;
  return NGramModel(a.order(), a.k(), a.vocab(), blend(a.counts(), b.counts(), alpha),
                    blend(a.bonus(), b.bonus(), alpha));
}

NGramModel absorb_units(const NGramModel& model, std::span<const std::string> units, double weight) {
  if (!(weight >= 0.0) || !std::isfinite(weight)) throw ParameterError("absorb", "weight must be >= 0");
  if (units.empty()) throw ParameterError("absorb", "corpus is empty");
  if (weight == 0.0) return model;
  CountTable counts = model.counts();
  for (const std::string& u : units) {
    TokenSeq seq = tokenize(u, model.vocab());
    if (seq.size() > 2) accumulate(counts, seq, model.order(), weight, false);
  }
  return NGramModel(model.order(), model.k(), model.vocab(), std::move(counts), model.bonus());
}

TokenId sample_canonical(const TokenDistribution& dist, double u) {
  const double target = u * dist.total();
  double cum = 0.0;
  for (const TokenProb& e : dist.entries()) {
    cum += e.p;
    if (target < cum) return e.id;
  }
  for (auto it = dist.entries().rbegin(); it != dist.entries().rend(); ++it) {
    if (it->p > 0.0) return it->id;
  }
  throw StructuralError("sample", "cannot sample from an empty distribution");
}

TokenSeq generate(const NGramModel& model, std::span<const TokenId> prompt, std::uint64_t seed, int max_len,
                  bool greedy) {
  if (max_len < 1) throw ParameterError("generate", "max_len must be at least 1");
  TokenSeq history(prompt.begin(), prompt.end());
  if (history.empty()) history.push_back(Vocabulary::kBos);
  Rng rng(seed);
  TokenSeq out;
  for (int step = 0; step < max_len; ++step) {
    const TokenDistribution dist = model.next_distribution(history);
    const TokenId next = greedy ? dist.top().id : sample_canonical(dist, rng.uniform01());
    out.push_back(next);
    history.push_back(next);
    if (next == Vocabulary::kEos) break;
  }
  return out;
}

TokenSeq greedy_response(const NGramModel& model, std::string_view prompt, int max_len) {
  TokenSeq history{Vocabulary::kBos};
  TokenSeq body = encode_words(prompt, model.vocab());
  history.insert(history.end(), body.begin(), body.end());
  TokenSeq out = generate(model, history, 0, max_len, true);
  if (!out.empty() && out.back() == Vocabulary::kEos) out.pop_back();
  return out;
}

}  // namespace imf::model
