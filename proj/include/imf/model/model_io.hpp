#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "imf/model/ngram_model.hpp"

namespace imf::model {

/// Model file layout (all integers little-endian, reals IEEE-754 binary64):
///
///   "IMFNGRAM"              8-byte magic
///   u32 format_version      currently 1
///   u8[32] sha256(body)     content hash, also NGramModel::content_hash()
///   u64 body_length
///   body:
///     u32 order, f64 k
///     u32 vocab_size, then per token: u32 byte_length, bytes   (id order)
///     count table, then bonus table, each:
///       u64 rows, then per row (contexts in lexicographic id order):
///         u32 context_length, u32 ids[context_length]
///         u32 entries, then per entry (ascending id): u32 id, f64 value
void save_model(const NGramModel& model, std::ostream& out);
void save_model_file(const NGramModel& model, const std::filesystem::path& path);

/// Throws FormatError on a bad magic, unknown version, truncated body or a body
/// whose digest does not match the stored hash.
NGramModel load_model(std::istream& in);
NGramModel load_model_file(const std::filesystem::path& path);

/// Canonical body bytes; the content hash is SHA-256 of this string.
std::string serialize_body(int order, double k, const Vocabulary& vocab, const CountTable& counts,
                           const CountTable& bonus);

}  // namespace imf::model
