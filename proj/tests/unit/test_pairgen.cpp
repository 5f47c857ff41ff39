#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "imf/codec/stego.hpp"
#include "imf/common/utf8.hpp"
#include "imf/model/tokenizer.hpp"
#include "imf/pairgen/baselines.hpp"
#include "imf/pairgen/fingerprint_pair.hpp"
#include "imf/pairgen/prompt_draft.hpp"
#include "imf/pairgen/refiner.hpp"
#include "imf/pairgen/similarity.hpp"
#include "imf/pairgen/stego_answer.hpp"

using namespace imf::pairgen;
using namespace imf::model;
using imf::codec::CodecKey;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string& corpus() {
  static const std::string text = read_file(std::string(IMF_DATA_DIR) + "/domain_corpus.txt");
  return text;
}

const NGramModel& stego_model() {
  static const NGramModel m = train(corpus(), TrainOptions{});
  return m;
}

const NGramModel& target_model() {
  static const NGramModel m = [] {
    TrainOptions o;
    o.order = 32;
    o.extra_vocabulary = template_lexicon();
    return train(corpus(), o);
  }();
  return m;
}

class EchoRefiner : public Refiner {
 public:
  std::string refine(std::string_view x_i, std::string_view, std::string_view) const override {
    ++calls;
    return std::string(x_i) + " again";
  }
  mutable int calls = 0;
};

}  // namespace

TEST_CASE("trigram cosine similarity") {
  CHECK(similarity("abc", "abc") == 1.0);
  CHECK(similarity("aaaa", "zzzz") == 0.0);
  CHECK(similarity("", "") == 1.0);
  CHECK(similarity("", "abc") == 0.0);
  CHECK(similarity("ABC def", "abc DEF") == doctest::Approx(1.0).epsilon(1e-15));
  // Naive counting: 9 distinct trigrams on the left, each once; on the right
  // "the" and "at " occur twice, the other 11 once. dot = 11, |b|^2 = 19.
  CHECK(similarity("the cat sat", "the cat sat there") == doctest::Approx(11.0 / std::sqrt(171.0)).epsilon(1e-15));
  CHECK(similarity("the cat sat", "the cat sat there") == doctest::Approx(0.8411910241920598).epsilon(1e-15));
  CHECK(similarity("river bank", "the bank of the river") == similarity("the bank of the river", "river bank"));
  CHECK(similarity("ab", "ab") == 1.0);
}

TEST_CASE("draft_x0") {
  const Draft d = draft_x0("rivers flood plains when rivers rise and flood the plains again", 0);
  CHECK(d.x.find("rivers") != std::string::npos);
  CHECK(d.x.find("flood") != std::string::npos);
  CHECK_FALSE(d.fallback);
  CHECK(d.keywords.size() <= kDraftKeywords);

  const Draft again = draft_x0("rivers flood plains when rivers rise and flood the plains again", 0);
  CHECK(again.x == d.x);
  CHECK(again.cot_prefix == d.cot_prefix);
  CHECK(draft_x0("rivers flood plains", 1).x != d.x);

  const Draft degenerate = draft_x0("it is what it is", 2);
  CHECK(degenerate.fallback);
  CHECK(degenerate.keywords.empty());
}

TEST_CASE("content keywords rank by frequency then first use") {
  const auto k = content_keywords("bridge river river village bridge river the a", 5);
  REQUIRE(k.size() == 3);
  CHECK(k[0] == "river");
  CHECK(k[1] == "bridge");
  CHECK(k[2] == "village");
  CHECK(compose_question("what follows about", {"a", "b"}) == "what follows about a b?");
}

TEST_CASE("generate_y carries the ownership payload") {
  const CodecKey key("owner-key");
  const std::string y = generate_y(stego_model(), "ACME-2025", key, "the river");
  CHECK(y.rfind("the river ", 0) == 0);
  CHECK(recover_ownership(stego_model(), y, key, "the river") == "ACME-2025");

  const CodecKey other("second-key");
  const std::string y2 = generate_y(stego_model(), "ACME-2025", other, "the river");
  CHECK(y2 != y);
  CHECK(recover_ownership(stego_model(), y2, other, "the river") == "ACME-2025");

  CHECK_THROWS_AS(generate_y(stego_model(), "", key, "the river"), imf::ParameterError);
  CHECK_THROWS_AS(recover_ownership(stego_model(), y, key, "a different start"), imf::codec::CorruptedStego);
  CHECK_THROWS_AS(generate_y(stego_model(), "ACME-2025", key, "the river", 3), imf::codec::CapacityExhausted);
}

TEST_CASE("refine_pair accepts an in-band draft immediately") {
  const std::string y = generate_y(stego_model(), "owner", CodecKey("k"), "the river");
  const Draft d = draft_x0(y, 0);
  EchoRefiner refiner;
  RefineOptions o;
  o.delta_low = 0.0;
  o.delta_high = 1.0;
  const FingerprintPair p = refine_pair(target_model(), y, d, refiner, o);
  CHECK(p.accepted);
  CHECK(p.iterations == 0);
  CHECK(p.x == d.x);
  CHECK(refiner.calls == 0);
  CHECK(p.style == Style::Imf);
  CHECK(p.y == y);
}

TEST_CASE("a verbatim natural response triggers refinement") {
  const std::string y = generate_y(stego_model(), "owner", CodecKey("k"), "the river");
  const Draft d = draft_x0(y, 0);
  FingerprintPair probe;
  probe.x = d.x;
  probe.cot_prefix = d.cot_prefix;
  const std::vector<TextPair> pairs{{probe.prompt(), y}};
  const NGramModel injected = inject(target_model(), pairs, 1e6);
  const std::string natural =
      detokenize(greedy_response(injected, probe.prompt(), static_cast<int>(normalize_words(y).size()) + 1),
                 injected.vocab());
  REQUIRE(natural == y);

  RefineOptions o;
  o.max_iterations = 4;
  const FingerprintPair p = refine_pair(injected, y, d, BuiltinRefiner(o.delta_low, o.delta_high), o);
  CHECK(p.x != d.x);
  CHECK(p.iterations >= 1);
}

TEST_CASE("refine budget exhaustion returns the best candidate unaccepted") {
  const std::string y = generate_y(stego_model(), "owner", CodecKey("k"), "the river");
  EchoRefiner refiner;
  RefineOptions o;
  o.max_iterations = 3;
  o.delta_low = 0.9999;
  o.delta_high = 1.0;
  const FingerprintPair p = refine_pair(target_model(), y, draft_x0(y, 0), refiner, o);
  CHECK_FALSE(p.accepted);
  CHECK(p.iterations == 3);
  CHECK(refiner.calls == 3);

  o.max_iterations = 0;
  CHECK_THROWS_AS(refine_pair(target_model(), y, draft_x0(y, 0), refiner, o), imf::ParameterError);
  o.max_iterations = 3;
  o.delta_low = 0.5;
  o.delta_high = 0.5;
  CHECK_THROWS_AS(refine_pair(target_model(), y, draft_x0(y, 0), refiner, o), imf::ParameterError);
}

TEST_CASE("builtin refiner always revises the prompt") {
  const BuiltinRefiner r(0.3, 0.95);
  const std::string x = "what follows about river bridge?";
  const std::string y = "the river runs under the old bridge near the village";
  CHECK(r.refine(x, y, y) == "what follows about river?");                  // too close: drop a keyword
  CHECK(r.refine(x, y, "zzzz qqqq") == "what follows about river bridge runs?");  // too far: add one
  CHECK(r.refine(x, y, "the river runs") != x);                              // in between: rotate lead
  CHECK(r.refine("what follows about river?", y, y) != "what follows about river?");
  CHECK(r.refine("a free form question", y, "zzzz") != "a free form question");
}

TEST_CASE("if-style garble") {
  std::set<std::string> distinct;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const FingerprintPair p = make_if_style(seed);
    CHECK(p.style == Style::IfStyle);
    CHECK(p.y == kDefaultIfPhrase);
    CHECK(make_if_style(seed).x == p.x);
    distinct.insert(p.x);
    const auto cps = imf::utf8::decode(p.x);
    CHECK(cps.size() >= 12);
    CHECK(cps.size() <= 24);
    std::set<imf::utf8::Script> scripts;
    bool symbol = false;
    for (char32_t c : cps) {
      const auto s = imf::utf8::classify(c);
      CHECK(s != imf::utf8::Script::Space);
      if (s == imf::utf8::Script::Symbol) symbol = true;
      else scripts.insert(s);
    }
    CHECK(scripts.size() >= 2);
    CHECK(symbol);
  }
  CHECK(distinct.size() == 100);
  CHECK(make_if_style(1, "custom phrase").y == "custom phrase");
}

TEST_CASE("chain-and-hash answers") {
  std::vector<std::string> questions;
  for (int i = 0; i < 20; ++i) questions.push_back("what is question number " + std::to_string(i) + "?");
  const std::vector<std::string> answers{"one", "ok", "yes", "two", "fine"};

  const FingerprintPair a = make_ch_style(questions, answers, "key-a", 3);
  CHECK(a.style == Style::ChStyle);
  CHECK(a.x == questions[3]);
  CHECK(make_ch_style(questions, answers, "key-a", 3).y == a.y);
  CHECK(std::find(answers.begin(), answers.end(), a.y) != answers.end());

  int differ = 0;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    const auto ya = make_ch_style(questions, answers, "key-a", i).y;
    const auto yb = make_ch_style(questions, answers, "key-b", i).y;
    CHECK(std::find(answers.begin(), answers.end(), yb) != answers.end());
    if (ya != yb) ++differ;
  }
  CHECK(differ > 0);

  CHECK_THROWS_AS(make_ch_style(questions, {}, "k"), imf::ParameterError);
  CHECK_THROWS_AS(make_ch_style({}, answers, "k"), imf::ParameterError);
}

TEST_CASE("jsonl round trip") {
  FingerprintPair p;
  p.x = "what follows about \"river\"?";
  p.y = "the river runs";
  p.cot_prefix = "let's think step by step about river.";
  p.similarity = 0.4375;
  p.iterations = 2;
  p.accepted = true;
  p.seed_context = "the river";
  std::vector<FingerprintPair> pairs{p, make_if_style(7), make_ch_style({"q?"}, {"ok"}, "k")};

  std::stringstream ss;
  write_jsonl(ss, pairs);
  const auto back = read_jsonl(ss);
  REQUIRE(back.size() == pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(back[i].style == pairs[i].style);
    CHECK(back[i].x == pairs[i].x);
    CHECK(back[i].y == pairs[i].y);
    CHECK(back[i].cot_prefix == pairs[i].cot_prefix);
    CHECK(back[i].similarity == pairs[i].similarity);
    CHECK(back[i].iterations == pairs[i].iterations);
    CHECK(back[i].accepted == pairs[i].accepted);
    CHECK(back[i].seed_context == pairs[i].seed_context);
  }
  CHECK(p.prompt() == "let's think step by step about river. what follows about \"river\"?");
  CHECK_THROWS_AS(from_jsonl_line("{\"style\":\"nope\"}"), imf::Error);
  CHECK_THROWS_AS(from_jsonl_line("not json"), imf::FormatError);
  CHECK(parse_style("ch_style") == Style::ChStyle);
  CHECK(style_name(Style::IfStyle) == "if_style");
}
