#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "imf/codec/bit_message.hpp"
#include "imf/codec/codec_key.hpp"
#include "imf/codec/grouping.hpp"
#include "imf/common/error.hpp"
#include "imf/common/rng.hpp"
#include "imf/model/ngram_model.hpp"

namespace imf::codec {

/// max_len ran out before every framed bit was embedded.
class CapacityExhausted : public Error {
 public:
  CapacityExhausted(std::size_t embedded, std::size_t required);
  std::size_t embedded() const noexcept { return embedded_; }
  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t embedded_;
  std::size_t required_;
};

/// CRC mismatch, implausible header, or stego text that ends early.
class CorruptedStego : public Error {
 public:
  using Error::Error;
};

/// An observed token is not in the support the embedder could have drawn from.
class DesyncError : public Error {
 public:
  using Error::Error;
};

/// Sequential reader over a framed bit string; reads past its end are filled
/// from the key's padding stream.
class BitSource {
 public:
  BitSource(const BitString& bits, std::uint64_t padding_seed) : bits_(bits), padding_(padding_seed) {}

  bool exhausted() const noexcept { return index_ >= bits_.size(); }
  std::size_t consumed() const noexcept { return std::min(index_, bits_.size()); }

  /// Next `n` bits as an unsigned integer, most significant first.
  std::size_t read(int n);

 private:
  const BitString& bits_;
  std::size_t index_ = 0;
  Rng padding_;
};

/// The distribution the codec draws from at one step: the model's canonical
/// distribution, with EOS removed and the rest renormalized while payload
/// bits are still pending.
model::TokenDistribution codec_distribution(const model::NGramModel& model, std::span<const model::TokenId> history,
                                            bool pending);

/// One generation step of the embedder. Regroups within the selected group for
/// as long as bits remain and the current distribution has capacity, then draws
/// the token with `u` from the final (restricted) distribution.
model::TokenId embed_step(model::TokenDistribution dist, BitSource& source, double u);

struct EmbedResult {
  model::TokenSeq tokens;  // generated continuation (EOS included when emitted)
  std::size_t bits_required = 0;
};

/// Embeds a raw bit string after `context`. With an empty bit string this is
/// token-for-token generate(model, context, key.sample_seed(), max_len, false).
EmbedResult embed_bits(const model::NGramModel& model, std::span<const model::TokenId> context, const BitString& bits,
                       const CodecKey& key, int max_len);

/// Embeds the framed message. Throws CapacityExhausted if max_len is reached first.
EmbedResult embed(const model::NGramModel& model, std::span<const model::TokenId> context, const BitMessage& message,
                  const CodecKey& key, int max_len);

/// Replays generation over `stego` and returns the payload.
///
/// Throws IdentityError when `expected_model_hash` is given and differs from the
/// model's content hash, DesyncError when a token lies outside the codec's
/// support, CorruptedStego on truncation or CRC failure.
BitMessage extract(const model::NGramModel& model, std::span<const model::TokenId> context,
                   std::span<const model::TokenId> stego, const CodecKey& key,
                   const std::optional<std::string>& expected_model_hash = std::nullopt);

}  // namespace imf::codec
