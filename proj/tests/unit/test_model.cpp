#include <doctest.h>

#include <cmath>
#include <sstream>

#include "imf/common/error.hpp"
#include "imf/model/model_io.hpp"
#include "imf/model/ngram_model.hpp"
#include "imf/model/tokenizer.hpp"

using namespace imf::model;

namespace {

TrainOptions opts(int order, double k) {
  TrainOptions o;
  o.order = order;
  o.k = k;
  return o;
}

TokenId id(const NGramModel& m, std::string_view w) { return m.vocab().find(w).value(); }

// Argmax over the whole vocabulary through per-token conditionals; shares no code
// with next_distribution's canonical construction.
TokenId brute_argmax(const NGramModel& m, const TokenSeq& history) {
  TokenId best = Vocabulary::kEos;
  double best_p = -1.0;
  for (TokenId t = 0; t < m.vocab().size(); ++t) {
    if (t == Vocabulary::kBos) continue;
    const double p = m.conditional(history, t);
    if (p > best_p) {
      best_p = p;
      best = t;
    }
  }
  return best;
}

std::vector<Context> all_histories(const NGramModel& m) {
  std::vector<Context> out;
  for (const auto& [ctx, row] : m.counts()) out.push_back(ctx);
  out.push_back({Vocabulary::kUnk, Vocabulary::kUnk});
  return out;
}

}  // namespace

TEST_CASE("vocabulary ids are dense with specials first and round-trip") {
  Vocabulary v = Vocabulary::from_words({"zeta", "alpha", "alpha", "<unk>", "mid"});
  REQUIRE(v.size() == 6);
  CHECK(v.token(Vocabulary::kBos) == "<s>");
  CHECK(v.token(Vocabulary::kEos) == "</s>");
  CHECK(v.token(Vocabulary::kUnk) == "<unk>");
  for (TokenId i = 0; i < v.size(); ++i) CHECK(v.find(v.token(i)).value() == i);
  CHECK_THROWS_AS(Vocabulary::from_id_order({"a", "b", "c"}), imf::FormatError);
}

TEST_CASE("tokenize frames, lowercases and maps unknowns") {
  Vocabulary v = Vocabulary::from_words({"the", "cat"});
  CHECK(tokenize("", v) == TokenSeq{Vocabulary::kBos, Vocabulary::kEos});
  const TokenId the = v.find("the").value();
  const TokenId cat = v.find("cat").value();
  CHECK(tokenize("the cat", v) == TokenSeq{Vocabulary::kBos, the, cat, Vocabulary::kEos});
  CHECK(tokenize("The CAT.", v) == TokenSeq{Vocabulary::kBos, the, cat, Vocabulary::kEos});
  CHECK(tokenize("the zyzzyx", v) == TokenSeq{Vocabulary::kBos, the, Vocabulary::kUnk, Vocabulary::kEos});
  CHECK(tokenize("the <unk> ?", v) == TokenSeq{Vocabulary::kBos, the, Vocabulary::kUnk, Vocabulary::kEos});
}

TEST_CASE("unknown word against a vocabulary built from a tiny corpus") {
  NGramModel m = train("the dog runs. the cat sleeps.", opts(2, 0.1));
  const TokenSeq t = tokenize("the zyzzyx", m.vocab());
  CHECK(t == TokenSeq{Vocabulary::kBos, id(m, "the"), Vocabulary::kUnk, Vocabulary::kEos});
}

TEST_CASE("sentence splitting") {
  auto s = split_sentences("A b. A b.\nA c!  Is it? yes");
  REQUIRE(s.size() == 5);
  CHECK(s[0] == std::vector<std::string>{"a", "b"});
  CHECK(s[4] == std::vector<std::string>{"yes"});
}

TEST_CASE("train rejects bad input") {
  CHECK_THROWS_AS(train("", opts(2, 0.1)), imf::TrainingError);
  CHECK_THROWS_AS(train(" ... ", opts(2, 0.1)), imf::TrainingError);
  CHECK_THROWS_AS(train("a b.", opts(1, 0.1)), imf::ParameterError);
  CHECK_THROWS_AS(train("a b.", opts(2, 0.0)), imf::ParameterError);
}

TEST_CASE("hand-counted bigram conditionals") {
  const double k = 0.5;
  NGramModel m = train("a b. a b. a c.", opts(2, k));
  // Vocabulary {BOS, EOS, UNK, a, b, c}; distributions range over 5 tokens.
  REQUIRE(m.support_size() == 5);
  const double S = 5.0;
  const TokenSeq ctx_a{id(m, "a")};
  CHECK(m.next_distribution(ctx_a).prob(id(m, "b")) == doctest::Approx((2 + k) / (3 + k * S)).epsilon(1e-15));
  CHECK(m.next_distribution(ctx_a).prob(id(m, "c")) == doctest::Approx((1 + k) / (3 + k * S)).epsilon(1e-15));

  SUBCASE("context [BOS] concentrates on a") {
    const TokenDistribution d = m.next_distribution(TokenSeq{Vocabulary::kBos});
    CHECK(d.top().id == id(m, "a"));
    CHECK(d.top().p == doctest::Approx((3 + k) / (3 + k * S)).epsilon(1e-15));
  }
  SUBCASE("unseen context backs off to the unigram row") {
    // Unigram counts of predicted tokens: a 3, b 2, c 1, EOS 3.
    const TokenDistribution d = m.next_distribution(TokenSeq{Vocabulary::kUnk});
    CHECK(d.prob(id(m, "a")) == doctest::Approx((3 + k) / (9 + k * S)).epsilon(1e-15));
    CHECK(d.prob(Vocabulary::kEos) == doctest::Approx((3 + k) / (9 + k * S)).epsilon(1e-15));
    CHECK(d.prob(Vocabulary::kUnk) == doctest::Approx(k / (9 + k * S)).epsilon(1e-15));
    CHECK(m.backoff_context(TokenSeq{Vocabulary::kUnk}).empty());
  }
}

TEST_CASE("distributions are canonical, exclude BOS and sum to one") {
  NGramModel m = train("the river floods the plain. the plain drinks the river. a storm comes.", opts(3, 0.01));
  for (const Context& h : all_histories(m)) {
    const TokenDistribution d = m.next_distribution(h);
    CHECK(d.size() == m.support_size());
    CHECK_FALSE(d.contains(Vocabulary::kBos));
    CHECK(std::abs(d.total() - 1.0) <= 1e-12);
    for (std::size_t i = 1; i < d.size(); ++i) CHECK(canonical_before(d.entries()[i - 1], d.entries()[i]));
  }
}

TEST_CASE("large k approaches uniform") {
  NGramModel m = train("a b. a b. a c.", opts(2, 1e9));
  const TokenDistribution d = m.next_distribution(TokenSeq{Vocabulary::kBos});
  CHECK(d.entries().front().p - d.entries().back().p < 1e-8);
}

TEST_CASE("greedy decoding reproduces a single training sentence") {
  NGramModel m = train("the quick brown fox jumps over lazy dogs", opts(2, 0.01));
  const TokenSeq out = generate(m, TokenSeq{Vocabulary::kBos}, 7, 50, true);
  TokenSeq expected;
  TokenSeq history{Vocabulary::kBos};
  while (expected.empty() || expected.back() != Vocabulary::kEos) {
    const TokenId t = brute_argmax(m, history);
    expected.push_back(t);
    history.push_back(t);
  }
  CHECK(out == expected);
  CHECK(detokenize(out, m.vocab()) == "the quick brown fox jumps over lazy dogs");
}

TEST_CASE("generate is deterministic and honours max_len") {
  NGramModel m = train("a b c. b c a. c a b. a c b.", opts(2, 0.3));
  const TokenSeq p{Vocabulary::kBos};
  CHECK(generate(m, p, 99, 30, false) == generate(m, p, 99, 30, false));
  CHECK(generate(m, p, 1, 1, false).size() == 1);
  CHECK(generate(m, p, 1, 1, true).size() == 1);
  CHECK_THROWS_AS(generate(m, p, 1, 0, true), imf::ParameterError);
}

TEST_CASE("sequence log-probability factorizes over steps") {
  NGramModel m = train("the river floods the plain. the plain drinks the river.", opts(3, 0.05));
  const TokenSeq seq = tokenize("the plain floods the river", m.vocab());
  double sum = 0.0;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    const TokenDistribution d = m.next_distribution(std::span(seq).first(i));
    sum += std::log(d.prob(seq[i]));
  }
  CHECK(m.log_prob(seq) == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("inject") {
  NGramModel base = train("what is the river. the river is wide. a storm is near.", opts(6, 0.01));
  const std::vector<TextPair> pair{{"what is the river", "a storm is wide"}};

  SUBCASE("zero strength is the identity") {
    NGramModel same = inject(base, pair, 0.0);
    CHECK(same.content_hash() == base.content_hash());
  }
  SUBCASE("large strength forces the greedy continuation") {
    NGramModel inj = inject(base, pair, 1e6);
    CHECK(detokenize(greedy_response(inj, "what is the river", 20), inj.vocab()) == "a storm is wide");
    CHECK(detokenize(greedy_response(base, "what is the river", 20), base.vocab()) != "a storm is wide");
  }
  SUBCASE("first answer token probability is monotone in strength") {
    const TokenSeq x = pair_sequence({"what is the river", ""}, base.vocab());
    const TokenSeq history(x.begin(), x.end() - 1);
    const TokenId first = id(base, "a");
    double prev = base.conditional(history, first);
    for (double lambda : {0.001, 0.01, 0.5, 1.0, 3.0, 10.0, 1e3, 1e6}) {
      const double p = inject(base, pair, lambda).conditional(history, first);
      CHECK(p >= prev);
      prev = p;
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(inject(base, pair, -1.0), imf::ParameterError);
    CHECK_THROWS_AS(inject(base, std::vector<TextPair>{}, 1.0), imf::ParameterError);
  }
  SUBCASE("base model is untouched") {
    const std::string before = base.content_hash();
    (void)inject(base, pair, 5.0);
    CHECK(base.content_hash() == before);
  }
}

TEST_CASE("merge") {
  NGramModel m = train("the river floods the plain. the plain drinks the river. a storm comes.", opts(3, 0.01));

  SUBCASE("self-merge is exact for any alpha") {
    for (double alpha : {0.0, 0.1, 0.3, 0.5, 0.77, 1.0}) {
      NGramModel s = merge(m, m, alpha);
      CHECK(s.content_hash() == m.content_hash());
      for (const Context& h : all_histories(m)) {
        const auto a = m.next_distribution(h).entries();
        const auto b = s.next_distribution(h).entries();
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
          CHECK(a[i].id == b[i].id);
          CHECK(a[i].p == b[i].p);
        }
      }
    }
  }
  SUBCASE("alpha one returns the first model") {
    NGramModel other = train("a storm comes. the plain floods. the river drinks the plain.", opts(3, 0.01));
    CHECK(merge(m, other, 1.0).content_hash() == m.content_hash());
    CHECK(merge(m, other, 0.0).content_hash() == other.content_hash());
  }
  SUBCASE("1:1 merge with the clean base halves the injected bonus") {
    const std::vector<TextPair> pairs{{"the river", "a storm comes"}, {"a storm", "the plain drinks"}};
    const double lambda = 8.0;
    NGramModel inj = inject(m, pairs, lambda);
    NGramModel merged = merge(inj, m, 0.5);
    REQUIRE_FALSE(inj.bonus().empty());
    for (const auto& [ctx, row] : inj.bonus()) {
      for (const auto& [tok, bonus] : row) {
        double base_count = 0.0;
        if (auto it = m.counts().find(ctx); it != m.counts().end() && it->second.contains(tok)) {
          base_count = it->second.at(tok);
        }
        CHECK(merged.counts().at(ctx).at(tok) == doctest::Approx(base_count + bonus / 2));
        CHECK(merged.bonus().at(ctx).at(tok) == doctest::Approx(bonus / 2));
      }
    }
  }
  SUBCASE("structural mismatch") {
    NGramModel other = train("completely different words here.", opts(3, 0.01));
    CHECK_THROWS_AS(merge(m, other, 0.5), imf::StructuralError);
    NGramModel higher = train("the river floods the plain. the plain drinks the river. a storm comes.", opts(4, 0.01));
    CHECK_THROWS_AS(merge(m, higher, 0.5), imf::StructuralError);
  }
}

TEST_CASE("masking the bonus restores the clean model") {
  NGramModel m = train("the river floods the plain. a storm comes.", opts(4, 0.01));
  NGramModel inj = inject(m, std::vector<TextPair>{{"the river", "a storm comes"}}, 1e4);
  CHECK(inj.without_bonus().content_hash() == m.content_hash());
  NGramModel merged = merge(inj, m, 0.5);
  CHECK(merged.without_bonus().content_hash() == m.content_hash());
}

TEST_CASE("model file round trip is bit-exact and hash guarded") {
  NGramModel m = inject(train("the river floods the plain. the plain drinks the river.", opts(3, 0.02)),
                        std::vector<TextPair>{{"the river", "drinks the plain"}}, 3.0);
  std::stringstream buf;
  save_model(m, buf);
  const std::string bytes = buf.str();
  std::istringstream in(bytes);
  NGramModel back = load_model(in);
  CHECK(back.content_hash() == m.content_hash());
  CHECK(back.bonus() == m.bonus());
  for (const Context& h : all_histories(m)) {
    const auto a = m.next_distribution(h).entries();
    const auto b = back.next_distribution(h).entries();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK((a[i].id == b[i].id && a[i].p == b[i].p));
  }

  std::string corrupt = bytes;
  corrupt[corrupt.size() - 3] ^= 0x01;
  std::istringstream bad(corrupt);
  CHECK_THROWS_AS(load_model(bad), imf::FormatError);
  std::istringstream truncated(bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(load_model(truncated), imf::FormatError);
}
