#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace imf::codec {

/// Shared secret of the symmetric codec (the same key embeds and extracts).
/// Two independent PRNG streams are derived from it: one drives in-group
/// sampling, the other supplies padding bits once the payload runs out.
class CodecKey {
 public:
  explicit CodecKey(std::string bytes) : bytes_(std::move(bytes)) {}

  const std::string& bytes() const noexcept { return bytes_; }
  std::uint64_t sample_seed() const;
  std::uint64_t padding_seed() const;

 private:
  std::string bytes_;
};

}  // namespace imf::codec
