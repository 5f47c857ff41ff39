#include "imf/pairgen/baselines.hpp"

#include <algorithm>

#include "imf/common/error.hpp"
#include "imf/common/hash.hpp"
#include "imf/common/rng.hpp"
#include "imf/common/utf8.hpp"

namespace imf::pairgen {
namespace {

constexpr std::u32string_view kSymbols = U"#$%&*@^~+=|<>§¤¶★※";

char32_t draw(Rng& rng, int cls) {
  switch (cls) {
    case 0: {
      const auto c = static_cast<char32_t>(rng.below(26));
      return rng.bit() ? U'a' + c : U'A' + c;
    }
    case 1:
      return static_cast<char32_t>(0x4E00 + rng.below(0x9FA5 - 0x4E00 + 1));
    default:
      return kSymbols[rng.below(kSymbols.size())];
  }
}

}  // namespace

std::string make_garble(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t len = 12 + rng.below(13);
  std::vector<char32_t> cps;
  cps.reserve(len);
  // One of each class first, then free draws, then a seeded shuffle.
  for (int cls = 0; cls < 3; ++cls) cps.push_back(draw(rng, cls));
  while (cps.size() < len) cps.push_back(draw(rng, static_cast<int>(rng.below(3))));
  for (std::size_t i = cps.size() - 1; i > 0; --i) std::swap(cps[i], cps[rng.below(i + 1)]);
  return utf8::encode(cps);
}

FingerprintPair make_if_style(std::uint64_t seed, std::string_view phrase) {
  FingerprintPair pair;
  pair.style = Style::IfStyle;
  pair.x = make_garble(seed);
  pair.y = std::string(phrase);
  pair.accepted = true;
  return pair;
}

std::size_t ch_answer_index(std::string_view key, std::string_view x, std::size_t bank_size) {
  if (bank_size == 0) throw ParameterError("make_ch_style", "answer bank is empty");
  std::string material(key);
  material.append(x);
  return static_cast<std::size_t>(digest_prefix_u64(sha256(material)) % bank_size);
}

FingerprintPair make_ch_style(const std::vector<std::string>& question_bank,
                              const std::vector<std::string>& answer_bank, std::string_view key, std::size_t index) {
  if (question_bank.empty()) throw ParameterError("make_ch_style", "question bank is empty");
  if (answer_bank.empty()) throw ParameterError("make_ch_style", "answer bank is empty");
  FingerprintPair pair;
  pair.style = Style::ChStyle;
  pair.x = question_bank[index % question_bank.size()];
  pair.y = answer_bank[ch_answer_index(key, pair.x, answer_bank.size())];
  pair.accepted = true;
  return pair;
}

}  // namespace imf::pairgen
