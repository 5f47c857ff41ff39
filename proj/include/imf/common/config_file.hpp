#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace imf {

/// Parses TOML or JSON text into a JSON value. TOML is assumed unless the
/// text starts with '{' after whitespace. Throws FormatError on syntax errors.
nlohmann::json parse_config_text(std::string_view text);

/// Reads and parses a config file; ".json" files are always parsed as JSON.
nlohmann::json load_config_file(const std::filesystem::path& path);

/// SHA-256 hex over the compact, key-sorted JSON dump.
std::string config_hash(const nlohmann::json& config);

}  // namespace imf
