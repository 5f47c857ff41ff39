#include "imf/codec/codec_key.hpp"

#include "imf/common/hash.hpp"

namespace imf::codec {

std::uint64_t CodecKey::sample_seed() const { return derive_seed(bytes_, "imf/codec/sample"); }
std::uint64_t CodecKey::padding_seed() const { return derive_seed(bytes_, "imf/codec/padding"); }

}  // namespace imf::codec
