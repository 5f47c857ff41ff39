#include "imf/codec/bit_message.hpp"

#include <openssl/evp.h>

#include "imf/common/error.hpp"
#include "imf/common/hash.hpp"

namespace imf::codec {
namespace {

void push_u32(BitString& bits, std::uint32_t v) {
  for (int i = 31; i >= 0; --i) bits.push_back(((v >> i) & 1U) != 0);
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

BitMessage::BitMessage(BitString payload) : payload_(std::move(payload)) {
  if (payload_.size() > 0xFFFFFFFFULL) throw ParameterError("codec", "payload longer than 2^32 - 1 bits");
}

BitMessage BitMessage::from_bytes(std::span<const std::uint8_t> bytes) { return BitMessage(bytes_to_bits(bytes)); }

BitMessage BitMessage::from_text(std::string_view text) {
  return from_bytes(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

BitString BitMessage::framed() const {
  BitString out;
  out.reserve(framed_size());
  push_u32(out, static_cast<std::uint32_t>(payload_.size()));
  push_u32(out, payload_crc(payload_));
  out.insert(out.end(), payload_.begin(), payload_.end());
  return out;
}

std::vector<std::uint8_t> BitMessage::bytes() const {
  if (payload_.size() % 8 != 0) throw ParameterError("codec", "payload is not a whole number of bytes");
  return bits_to_bytes(payload_);
}

std::uint32_t payload_crc(const BitString& payload) { return imf::crc32(bits_to_bytes(payload)); }

BitString bytes_to_bits(std::span<const std::uint8_t> bytes) {
  BitString bits;
  bits.reserve(bytes.size() * 8);
  for (std::uint8_t b : bytes) {
    for (int i = 7; i >= 0; --i) bits.push_back(((b >> i) & 1U) != 0);
  }
  return bits;
}

std::vector<std::uint8_t> bits_to_bytes(const BitString& bits) {
  std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8));
  }
  return out;
}

std::string hex_encode(std::span<const std::uint8_t> bytes) { return imf::to_hex(bytes); }

std::vector<std::uint8_t> hex_decode(std::string_view hex) {
  if (hex.size() % 2 != 0) throw ParameterError("codec", "hex payload has odd length");
  std::vector<std::uint8_t> out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = hex_value(hex[i]);
    const int lo = hex_value(hex[i + 1]);
    if (hi < 0 || lo < 0) throw ParameterError("codec", "invalid hex digit in payload");
    out.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
  }
  return out;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw ParameterError("codec", "base64 payload length is not a multiple of 4");
  std::vector<std::uint8_t> out(3 * text.size() / 4);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()), static_cast<int>(text.size()));
  if (n < 0) throw ParameterError("codec", "invalid base64 payload");
  std::size_t len = static_cast<std::size_t>(n);
  // EVP_DecodeBlock keeps the bytes produced by '=' padding.
  if (!text.empty() && text.back() == '=') --len;
  if (text.size() >= 2 && text[text.size() - 2] == '=') --len;
  out.resize(len);
  return out;
}

}  // namespace imf::codec
