#include "imf/common/config_file.hpp"

#include <fstream>
#include <sstream>

#include <toml.hpp>

#include "imf/common/error.hpp"
#include "imf/common/hash.hpp"

namespace imf {
namespace {

nlohmann::json from_toml(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& [key, value] : *t) obj[std::string(key.str())] = from_toml(value);
    return obj;
  }
  if (const auto* a = node.as_array()) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& value : *a) arr.push_back(from_toml(value));
    return arr;
  }
  if (const auto* s = node.as_string()) return s->get();
  if (const auto* i = node.as_integer()) return i->get();
  if (const auto* f = node.as_floating_point()) return f->get();
  if (const auto* b = node.as_boolean()) return b->get();
  throw FormatError("config", "dates and times are not supported in config files");
}

}  // namespace

nlohmann::json parse_config_text(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    try {
      return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("config", std::string("invalid JSON: ") + e.what());
    }
  }
  try {
    return from_toml(toml::parse(text));
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "invalid TOML at line " << e.source().begin.line << ": " << e.description();
    throw FormatError("config", msg.str());
  }
}

nlohmann::json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("config", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  if (path.extension() == ".json") {
    try {
      return nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("config", path.string() + ": " + e.what());
    }
  }
  return parse_config_text(ss.str());
}

std::string config_hash(const nlohmann::json& config) {
  // nlohmann::json objects are std::map backed, so dump() is key-sorted.
  const Sha256Digest d = sha256(config.dump());
  return to_hex(d);
}

}  // namespace imf
