#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace imf::pairgen {

enum class Style { Imf, IfStyle, ChStyle };

std::string_view style_name(Style s);
/// Throws ParameterError for an unknown name.
Style parse_style(std::string_view name);

/// One fingerprint (x, y) pair and how it was obtained.
struct FingerprintPair {
  Style style = Style::Imf;
  std::string x;
  std::string y;
  std::string cot_prefix;  // reasoning scaffold placed before x in the prompt
  double similarity = 0.0; // similarity(y, natural response) at the last evaluation
  int iterations = 0;      // refinements applied
  bool accepted = false;

  // Metadata beyond the core schema, written under "meta".
  std::string seed_context;       // imf: cover context of the stego answer
  bool fallback_template = false; // imf: draft had no content words

  /// The full query: cot_prefix, a space, then x (just x without a prefix).
  std::string prompt() const;
};

/// One JSON object per line:
/// {"style","x","y","cot_prefix","similarity","iterations","accepted","meta":{...}}
std::string to_jsonl_line(const FingerprintPair& pair);
FingerprintPair from_jsonl_line(std::string_view line);

void write_jsonl(std::ostream& out, const std::vector<FingerprintPair>& pairs);
std::vector<FingerprintPair> read_jsonl(std::istream& in);

}  // namespace imf::pairgen
