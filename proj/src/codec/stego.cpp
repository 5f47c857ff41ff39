#include "imf/codec/stego.hpp"

namespace imf::codec {

using model::NGramModel;
using model::TokenDistribution;
using model::TokenId;
using model::TokenSeq;
using model::Vocabulary;

namespace {

/// Bits recovered so far; knows how many it needs once the length header is in.
class BitSink {
 public:
  bool complete() const { return bits_.size() >= 32 && bits_.size() >= BitMessage::kHeaderBits + payload_length(); }

  void append(std::size_t value, int n) {
    for (int i = n - 1; i >= 0; --i) bits_.push_back(((value >> i) & 1U) != 0);
    if (bits_.size() >= 32 && payload_length() > kMaxPayloadBits) {
      throw CorruptedStego("extract", "length header announces an implausible payload");
    }
  }

  BitMessage finish() const {
    if (!complete()) throw CorruptedStego("extract", "stego text ends before the payload is complete");
    const std::size_t len = payload_length();
    BitString payload(bits_.begin() + BitMessage::kHeaderBits,
                      bits_.begin() + static_cast<std::ptrdiff_t>(BitMessage::kHeaderBits + len));
    if (payload_crc(payload) != field(32)) throw CorruptedStego("extract", "payload CRC mismatch");
    return BitMessage(std::move(payload));
  }

 private:
  static constexpr std::size_t kMaxPayloadBits = std::size_t{1} << 24;

  std::uint32_t field(std::size_t offset) const {
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < 32; ++i) v = (v << 1) | (bits_[offset + i] ? 1U : 0U);
    return v;
  }
  std::size_t payload_length() const { return field(0); }

  BitString bits_;
};

}  // namespace

CapacityExhausted::CapacityExhausted(std::size_t embedded, std::size_t required)
    : Error("embed", "capacity exhausted: embedded " + std::to_string(embedded) + " of " + std::to_string(required) +
                         " framed bits before max_len"),
      embedded_(embedded),
      required_(required) {}

std::size_t BitSource::read(int n) {
  std::size_t v = 0;
  for (int i = 0; i < n; ++i) {
    const bool b = index_ < bits_.size() ? static_cast<bool>(bits_[index_]) : padding_.bit();
    v = (v << 1) | (b ? 1U : 0U);
    ++index_;
  }
  return v;
}

TokenDistribution codec_distribution(const NGramModel& model, std::span<const TokenId> history, bool pending) {
  TokenDistribution dist = model.next_distribution(history);
  return pending ? dist.without(Vocabulary::kEos) : dist;
}

TokenId embed_step(TokenDistribution dist, BitSource& source, double u) {
  while (!source.exhausted()) {
    std::optional<Grouping> grouping = plan_grouping(dist);
    if (!grouping) break;
    const std::size_t index = source.read(grouping->bits);
    dist = grouping->group_distribution(index);
  }
  return model::sample_canonical(dist, u);
}

EmbedResult embed_bits(const NGramModel& model, std::span<const TokenId> context, const BitString& bits,
                       const CodecKey& key, int max_len) {
  if (max_len < 1) throw ParameterError("embed", "max_len must be at least 1");
  TokenSeq history(context.begin(), context.end());
  if (history.empty()) history.push_back(Vocabulary::kBos);
  BitSource source(bits, key.padding_seed());
  Rng sampler(key.sample_seed());
  EmbedResult result;
  result.bits_required = bits.size();
  for (int step = 0; step < max_len; ++step) {
    TokenDistribution dist = codec_distribution(model, history, !source.exhausted());
    const TokenId next = embed_step(std::move(dist), source, sampler.uniform01());
    result.tokens.push_back(next);
    history.push_back(next);
    if (next == Vocabulary::kEos) break;
  }
  if (!source.exhausted()) throw CapacityExhausted(source.consumed(), bits.size());
  return result;
}

EmbedResult embed(const NGramModel& model, std::span<const TokenId> context, const BitMessage& message,
                  const CodecKey& key, int max_len) {
  return embed_bits(model, context, message.framed(), key, max_len);
}

BitMessage extract(const NGramModel& model, std::span<const TokenId> context, std::span<const TokenId> stego,
                   const CodecKey& key, const std::optional<std::string>& expected_model_hash) {
  // The key seeds only sampling and padding; each token's group index is read
  // off the replayed grouping.
  (void)key;
  if (expected_model_hash && *expected_model_hash != model.content_hash()) {
    throw IdentityError("extract", "model hash mismatch: stego was produced with model " + *expected_model_hash +
                                       " but extracting with " + model.content_hash());
  }
  TokenSeq history(context.begin(), context.end());
  if (history.empty()) history.push_back(Vocabulary::kBos);
  BitSink sink;
  for (std::size_t pos = 0; pos < stego.size() && !sink.complete(); ++pos) {
    const TokenId observed = stego[pos];
    TokenDistribution dist = codec_distribution(model, history, true);
    while (!sink.complete()) {
      std::optional<Grouping> grouping = plan_grouping(dist);
      if (!grouping) break;
      const std::optional<std::size_t> index = grouping->group_of(observed);
      if (!index) break;
      sink.append(*index, grouping->bits);
      dist = grouping->group_distribution(*index);
    }
    if (!dist.contains(observed)) {
      throw DesyncError("extract", "token at position " + std::to_string(pos) + " is outside the codec support");
    }
    history.push_back(observed);
  }
  return sink.finish();
}

}  // namespace imf::codec
