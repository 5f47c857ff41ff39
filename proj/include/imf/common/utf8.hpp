#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace imf::utf8 {

/// Decodes UTF-8 into code points. Malformed bytes decode as U+FFFD.
std::vector<char32_t> decode(std::string_view text);

std::string encode(char32_t cp);
std::string encode(const std::vector<char32_t>& cps);

/// Lowercases ASCII letters only; other code points pass through.
std::string ascii_lower(std::string_view text);

inline bool is_ascii_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v';
}
inline bool is_ascii_alpha(char32_t c) { return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z'); }
inline bool is_ascii_digit(char32_t c) { return c >= U'0' && c <= U'9'; }
inline bool is_ascii_punct(char32_t c) {
  return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
         (c >= 0x7B && c <= 0x7E);
}

enum class Script { Latin, Digit, Cjk, Other, Symbol, Space };

Script classify(char32_t c);

}  // namespace imf::utf8
