#include "imf/pairgen/stego_answer.hpp"

#include <algorithm>

#include "imf/codec/stego.hpp"
#include "imf/common/error.hpp"
#include "imf/model/tokenizer.hpp"

namespace imf::pairgen {
namespace {

model::TokenSeq context_tokens(const model::NGramModel& model, std::string_view seed_context) {
  model::TokenSeq ctx{model::Vocabulary::kBos};
  const model::TokenSeq words = model::encode_words(seed_context, model.vocab());
  ctx.insert(ctx.end(), words.begin(), words.end());
  return ctx;
}

}  // namespace

std::string generate_y(const model::NGramModel& model, std::string_view ownership, const codec::CodecKey& key,
                       std::string_view seed_context, int max_len) {
  if (ownership.empty()) throw ParameterError("generate_y", "ownership payload is empty");
  const model::TokenSeq ctx = context_tokens(model, seed_context);
  const codec::EmbedResult result =
      codec::embed(model, ctx, codec::BitMessage::from_text(ownership), key, max_len);
  model::TokenSeq all(ctx.begin() + 1, ctx.end());
  all.insert(all.end(), result.tokens.begin(), result.tokens.end());
  return model::detokenize(all, model.vocab());
}

std::string recover_ownership(const model::NGramModel& model, std::string_view y, const codec::CodecKey& key,
                              std::string_view seed_context) {
  const model::TokenSeq ctx = context_tokens(model, seed_context);
  model::TokenSeq words = model::encode_words(y, model.vocab());
  const std::size_t lead = ctx.size() - 1;
  if (words.size() < lead || !std::equal(ctx.begin() + 1, ctx.end(), words.begin())) {
    throw codec::CorruptedStego("extract", "answer does not start with its seed context");
  }
  // detokenize drops EOS; restore it so extraction sees the full stego run.
  words.push_back(model::Vocabulary::kEos);
  const std::span<const model::TokenId> stego(words.begin() + static_cast<std::ptrdiff_t>(lead), words.end());
  const std::vector<std::uint8_t> payload = codec::extract(model, ctx, stego, key).bytes();
  return std::string(payload.begin(), payload.end());
}

}  // namespace imf::pairgen
