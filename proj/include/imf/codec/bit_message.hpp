#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace imf::codec {

using BitString = std::vector<bool>;

/// Ownership payload with its self-delimiting frame.
///
/// Frame layout, most significant bit first:
///   32-bit payload length in bits | 32-bit CRC-32 of the payload | payload
/// The CRC covers the payload packed MSB-first into bytes, last byte zero-padded.
class BitMessage {
 public:
  static constexpr std::size_t kHeaderBits = 64;

  BitMessage() = default;
  explicit BitMessage(BitString payload);

  static BitMessage from_bytes(std::span<const std::uint8_t> bytes);
  static BitMessage from_text(std::string_view text);

  const BitString& payload() const noexcept { return payload_; }
  std::size_t framed_size() const noexcept { return kHeaderBits + payload_.size(); }
  BitString framed() const;

  /// Packs the payload into bytes; throws ParameterError if not byte aligned.
  std::vector<std::uint8_t> bytes() const;

  bool operator==(const BitMessage&) const = default;

 private:
  BitString payload_;
};

std::uint32_t payload_crc(const BitString& payload);

BitString bytes_to_bits(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> bits_to_bytes(const BitString& bits);

std::string hex_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> hex_decode(std::string_view hex);
std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace imf::codec
