#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "imf/codec/audit.hpp"
#include "imf/codec/stego.hpp"
#include "imf/common/rng.hpp"
#include "imf/model/tokenizer.hpp"

using namespace imf::codec;
using namespace imf::model;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const NGramModel& corpus_model() {
  static const NGramModel m = [] {
    TrainOptions o;
    o.order = 2;
    o.k = 1e-3;
    return train(read_file(std::string(IMF_DATA_DIR) + "/domain_corpus.txt"), o);
  }();
  return m;
}

TokenDistribution dist_of(std::vector<TokenProb> e) { return TokenDistribution::from_entries(std::move(e)); }

BitString random_bits(imf::Rng& rng, std::size_t n) {
  BitString b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = rng.bit();
  return b;
}

// Bits carried by one token: walk the nested groupings that contain it.
std::size_t bits_at_step(TokenDistribution d, TokenId token) {
  std::size_t bits = 0;
  while (auto g = plan_grouping(d)) {
    const std::size_t idx = g->group_of(token).value();
    bits += static_cast<std::size_t>(g->bits);
    d = g->group_distribution(idx);
  }
  return bits;
}

}  // namespace

TEST_CASE("frame layout") {
  const BitMessage m(BitString{true, false, true});
  const BitString f = m.framed();
  REQUIRE(f.size() == 64 + 3);
  for (int i = 0; i < 30; ++i) CHECK_FALSE(f[i]);
  CHECK(f[30]);
  CHECK(f[31]);
  CHECK(BitMessage().framed_size() == 64);
  CHECK(BitMessage::from_text("AB").payload().size() == 16);
  CHECK(BitMessage::from_text("AB").bytes() == std::vector<std::uint8_t>{'A', 'B'});
}

TEST_CASE("hex and base64 payload encodings invert") {
  imf::Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::uint8_t> bytes(rng.below(20));
    for (auto& b : bytes) b = static_cast<std::uint8_t>(rng.below(256));
    CHECK(hex_decode(hex_encode(bytes)) == bytes);
    CHECK(base64_decode(base64_encode(bytes)) == bytes);
  }
  CHECK(base64_encode(std::vector<std::uint8_t>{'h', 'i'}) == "aGk=");
  CHECK_THROWS_AS(hex_decode("abc"), imf::ParameterError);
  CHECK_THROWS_AS(hex_decode("zz"), imf::ParameterError);
}

TEST_CASE("capacity bits") {
  CHECK(capacity_bits(0.6) == 0);
  CHECK(capacity_bits(0.5) == 1);
  CHECK(capacity_bits(0.4) == 1);
  CHECK(capacity_bits(0.25) == 2);
  CHECK(capacity_bits(0.2) == 2);
  CHECK(capacity_bits(0.125) == 3);
  CHECK(capacity_bits(0.1) == 3);
}

TEST_CASE("plan_grouping examples") {
  SUBCASE("no capacity above one half") {
    CHECK_FALSE(plan_grouping(dist_of({{0, 0.6}, {1, 0.4}})).has_value());
  }
  SUBCASE("greedy rule on 0.4/0.3/0.2/0.1") {
    // a=10, b=11, c=12, d=13: seeds a, b; c joins b (0.3 < 0.4); d joins a (0.4 < 0.5).
    auto g = plan_grouping(dist_of({{10, 0.4}, {11, 0.3}, {12, 0.2}, {13, 0.1}}));
    REQUIRE(g.has_value());
    CHECK(g->bits == 1);
    REQUIRE(g->groups.size() == 2);
    CHECK(g->groups[0].seed == 10);
    CHECK(g->groups[0].mass == doctest::Approx(0.5));
    CHECK(g->groups[1].mass == doctest::Approx(0.5));
    CHECK(g->group_of(10) == 0u);
    CHECK(g->group_of(13) == 0u);
    CHECK(g->group_of(11) == 1u);
    CHECK(g->group_of(12) == 1u);
  }
  SUBCASE("uniform over four gives singletons") {
    auto g = plan_grouping(dist_of({{7, 0.25}, {3, 0.25}, {9, 0.25}, {5, 0.25}}));
    REQUIRE(g.has_value());
    CHECK(g->bits == 2);
    REQUIRE(g->groups.size() == 4);
    const std::vector<TokenId> seeds{3, 5, 7, 9};
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(g->groups[i].seed == seeds[i]);
      CHECK(g->groups[i].members.size() == 1);
      CHECK(g->groups[i].mass == 0.25);
    }
  }
  SUBCASE("empty distribution") { CHECK_THROWS_AS(plan_grouping(TokenDistribution{}), imf::StructuralError); }
}

TEST_CASE("grouping invariants on random distributions") {
  imf::Rng rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng.below(60);
    std::vector<TokenProb> e;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      // Mix of flat and spiky shapes.
      const double w = trial % 3 == 0 ? std::pow(rng.uniform01(), 6.0) + 1e-9 : rng.uniform01() + 1e-9;
      e.push_back({static_cast<TokenId>(i * 3 + 1), w});
      sum += w;
    }
    for (auto& x : e) x.p /= sum;
    const TokenDistribution d = dist_of(e).renormalized();
    const auto g = plan_grouping(d);
    const double pmax = d.p_max();
    const int expected_bits = pmax <= 0.5 ? static_cast<int>(std::floor(-std::log2(pmax))) : 0;
    if (!g) {
      CHECK(expected_bits == 0);
      continue;
    }
    CHECK(g->bits == expected_bits);
    REQUIRE(g->groups.size() == (std::size_t{1} << g->bits));
    std::set<TokenId> seen;
    double largest_after_seed = 0.0;
    for (const Group& grp : g->groups) {
      CHECK_FALSE(grp.members.empty());
      for (std::size_t i = 0; i < grp.members.size(); ++i) {
        CHECK(seen.insert(grp.members[i].id).second);
        if (i > 0) largest_after_seed = std::max(largest_after_seed, grp.members[i].p);
      }
    }
    CHECK(seen.size() == d.size());
    const double target = std::ldexp(1.0, -g->bits);
    for (const Group& grp : g->groups) CHECK(std::abs(grp.mass - target) <= largest_after_seed + 1e-12);
    // Replay yields the same partition.
    const auto again = plan_grouping(d);
    for (std::size_t i = 0; i < g->groups.size(); ++i) CHECK(again->groups[i].seed == g->groups[i].seed);
  }
}

TEST_CASE("single-step trace on 0.4/0.3/0.2/0.1") {
  const TokenDistribution d = dist_of({{10, 0.4}, {11, 0.3}, {12, 0.2}, {13, 0.1}});
  const BitString zero{false};
  const BitString one{true};
  for (double u = 0.0; u < 1.0; u += 0.01) {
    BitSource s0(zero, 1);
    const TokenId t0 = embed_step(d, s0, u);
    CHECK((t0 == 10 || t0 == 13));
    BitSource s1(one, 1);
    const TokenId t1 = embed_step(d, s1, u);
    CHECK((t1 == 11 || t1 == 12));
  }
  // Within the selected group the draw follows renormalized mass: a 0.8, d 0.2.
  BitSource s(zero, 1);
  CHECK(embed_step(d, s, 0.79) == 10);
  BitSource s2(zero, 1);
  CHECK(embed_step(d, s2, 0.81) == 13);
}

TEST_CASE("zero-bit embedding is plain sampled generation") {
  const NGramModel& m = corpus_model();
  const CodecKey key("zero-bit");
  const TokenSeq ctx{Vocabulary::kBos};
  const EmbedResult r = embed_bits(m, ctx, BitString{}, key, 60);
  CHECK(r.tokens == generate(m, ctx, key.sample_seed(), 60, false));
}

TEST_CASE("round trip on random payloads, keys and contexts") {
  const NGramModel& m = corpus_model();
  imf::Rng rng(77);
  for (int trial = 0; trial < 150; ++trial) {
    const BitMessage msg(random_bits(rng, 1 + rng.below(512)));
    const CodecKey key("key-" + std::to_string(rng.next()));
    const TokenSeq ctx{Vocabulary::kBos, static_cast<TokenId>(3 + rng.below(m.vocab().size() - 3))};
    const EmbedResult r = embed(m, ctx, msg, key, 2000);
    CHECK(extract(m, ctx, r.tokens, key, m.content_hash()) == msg);
  }
}

TEST_CASE("embedding is deterministic and key separated") {
  const NGramModel& m = corpus_model();
  const BitMessage msg = BitMessage::from_text("ACME-2025");
  const TokenSeq ctx{Vocabulary::kBos};
  const EmbedResult a = embed(m, ctx, msg, CodecKey("k1"), 800);
  CHECK(a.tokens == embed(m, ctx, msg, CodecKey("k1"), 800).tokens);
  const EmbedResult b = embed(m, ctx, msg, CodecKey("k2"), 800);
  CHECK(a.tokens != b.tokens);
  CHECK(extract(m, ctx, a.tokens, CodecKey("k1")) == msg);
  CHECK(extract(m, ctx, b.tokens, CodecKey("k2")) == msg);
}

TEST_CASE("empty payload frame") {
  const NGramModel& m = corpus_model();
  const TokenSeq ctx{Vocabulary::kBos};
  const EmbedResult r = embed(m, ctx, BitMessage{}, CodecKey("e"), 400);
  CHECK(extract(m, ctx, r.tokens, CodecKey("e")).payload().empty());
}

TEST_CASE("single-token mutation into another group is detected") {
  const NGramModel& m = corpus_model();
  const BitMessage msg = BitMessage::from_text("owner");
  const TokenSeq ctx{Vocabulary::kBos};
  const EmbedResult r = embed(m, ctx, msg, CodecKey("mut"), 800);
  int payload_mutations = 0;
  int header_mutations = 0;
  std::size_t bits_before = 0;
  TokenSeq history = ctx;
  for (std::size_t pos = 0; pos < r.tokens.size() && bits_before < msg.framed_size(); ++pos) {
    const TokenDistribution d = codec_distribution(m, history, true);
    history.push_back(r.tokens[pos]);
    const auto g = plan_grouping(d);
    if (!g) continue;
    const std::size_t step_bits = bits_at_step(d, r.tokens[pos]);
    const std::size_t own = *g->group_of(r.tokens[pos]);
    TokenSeq bad = r.tokens;
    bad[pos] = g->groups[(own + 1) % g->groups.size()].members.front().id;
    if (bits_before >= BitMessage::kHeaderBits) {
      // Length header intact: the flipped bits land in the payload.
      CHECK_THROWS_AS(extract(m, ctx, bad, CodecKey("mut")), CorruptedStego);
      ++payload_mutations;
    } else {
      // A corrupted length header can also surface as a desync.
      CHECK_THROWS_AS(extract(m, ctx, bad, CodecKey("mut")), imf::Error);
      ++header_mutations;
    }
    bits_before += step_bits;
  }
  CHECK(payload_mutations > 0);
  CHECK(header_mutations > 0);
}

TEST_CASE("codec error paths") {
  const NGramModel& m = corpus_model();
  const BitMessage msg = BitMessage::from_text("ACME-2025");
  const TokenSeq ctx{Vocabulary::kBos};

  SUBCASE("capacity exhausted names embedded and required bits") {
    try {
      (void)embed(m, ctx, msg, CodecKey("c"), 3);
      FAIL("expected CapacityExhausted");
    } catch (const CapacityExhausted& e) {
      CHECK(e.required() == msg.framed_size());
      CHECK(e.embedded() < e.required());
    }
  }
  const EmbedResult r = embed(m, ctx, msg, CodecKey("c"), 800);
  SUBCASE("hash mismatch") {
    CHECK_THROWS_AS(extract(m, ctx, r.tokens, CodecKey("c"), std::string(64, '0')), imf::IdentityError);
  }
  SUBCASE("truncated stego") {
    const TokenSeq cut(r.tokens.begin(), r.tokens.begin() + 4);
    CHECK_THROWS_AS(extract(m, ctx, cut, CodecKey("c")), CorruptedStego);
  }
  SUBCASE("EOS while payload pending is a desync") {
    TokenSeq bad = r.tokens;
    bad[1] = Vocabulary::kEos;
    CHECK_THROWS_AS(extract(m, ctx, bad, CodecKey("c")), DesyncError);
  }
}

TEST_CASE("security audit") {
  TrainOptions o;
  o.order = 2;
  o.k = 1e-6;
  // After BOS: a, b, c and <unk> once each; EOS is excluded while bits are pending,
  // leaving an exactly uniform distribution over four tokens.
  const NGramModel uniform = train("a. b. c. <unk>.", o);
  const TokenSeq bos{Vocabulary::kBos};
  REQUIRE(codec_distribution(uniform, bos, true).p_max() == doctest::Approx(0.25).epsilon(1e-12));

  AuditOptions opts;
  opts.trials = 100000;
  opts.seed = 3;
  const AuditReport balanced = security_audit(uniform, bos, opts);
  CHECK(balanced.tv_distance < 0.01);
  CHECK(balanced.p_value > 0.01);
  CHECK_FALSE(balanced.flagged);

  opts.payload = AuditPayload::AllZero;
  const AuditReport skewed = security_audit(uniform, bos, opts);
  CHECK(skewed.tv_distance > 0.5);
  CHECK(skewed.flagged);

  const NGramModel peaked = train("x y. x y. x y. x z.", o);
  const TokenSeq ctx_x{Vocabulary::kBos, peaked.vocab().find("x").value()};
  opts.payload = AuditPayload::Random;
  opts.trials = 20000;
  CHECK(security_audit(peaked, ctx_x, opts).tv_distance < 0.01);

  opts.trials = 100;
  CHECK_THROWS_AS(security_audit(uniform, bos, opts), imf::ParameterError);
  CHECK(balanced.to_json().find("\"tv_distance\"") != std::string::npos);
}
