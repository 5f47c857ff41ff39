#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace imf {

using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest sha256(std::span<const std::uint8_t> bytes);
Sha256Digest sha256(std::string_view text);

std::string to_hex(std::span<const std::uint8_t> bytes);

/// First eight digest bytes read big-endian.
std::uint64_t digest_prefix_u64(const Sha256Digest& digest);

/// Seed derivation: SHA-256 over `material || 0x00 || domain`.
std::uint64_t derive_seed(std::string_view material, std::string_view domain);

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

}  // namespace imf
