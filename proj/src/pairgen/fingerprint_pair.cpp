#include "imf/pairgen/fingerprint_pair.hpp"

#include <istream>
#include <json.hpp>
#include <ostream>

#include "imf/common/error.hpp"

namespace imf::pairgen {

std::string_view style_name(Style s) {
  switch (s) {
    case Style::Imf:
      return "imf";
    case Style::IfStyle:
      return "if_style";
    case Style::ChStyle:
      return "ch_style";
  }
  return "imf";
}

Style parse_style(std::string_view name) {
  if (name == "imf") return Style::Imf;
  if (name == "if_style" || name == "if") return Style::IfStyle;
  if (name == "ch_style" || name == "ch") return Style::ChStyle;
  throw ParameterError("pairgen", "unknown fingerprint style '" + std::string(name) + "'");
}

std::string FingerprintPair::prompt() const { return cot_prefix.empty() ? x : cot_prefix + " " + x; }

std::string to_jsonl_line(const FingerprintPair& p) {
  nlohmann::ordered_json j;
  j["style"] = style_name(p.style);
  j["x"] = p.x;
  j["y"] = p.y;
  j["cot_prefix"] = p.cot_prefix;
  j["similarity"] = p.similarity;
  j["iterations"] = p.iterations;
  j["accepted"] = p.accepted;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  if (!p.seed_context.empty()) meta["seed_context"] = p.seed_context;
  if (p.fallback_template) meta["fallback_template"] = true;
  j["meta"] = meta;
  return j.dump();
}

FingerprintPair from_jsonl_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
    FingerprintPair p;
    p.style = parse_style(j.at("style").get<std::string>());
    p.x = j.at("x").get<std::string>();
    p.y = j.at("y").get<std::string>();
    p.cot_prefix = j.value("cot_prefix", "");
    p.similarity = j.value("similarity", 0.0);
    p.iterations = j.value("iterations", 0);
    p.accepted = j.value("accepted", false);
    if (j.contains("meta") && j["meta"].is_object()) {
      p.seed_context = j["meta"].value("seed_context", "");
      p.fallback_template = j["meta"].value("fallback_template", false);
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("pairs", std::string("malformed pair record: ") + e.what());
  }
}

void write_jsonl(std::ostream& out, const std::vector<FingerprintPair>& pairs) {
  for (const FingerprintPair& p : pairs) out << to_jsonl_line(p) << '\n';
}

std::vector<FingerprintPair> read_jsonl(std::istream& in) {
  std::vector<FingerprintPair> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(from_jsonl_line(line));
  }
  return out;
}

}  // namespace imf::pairgen
