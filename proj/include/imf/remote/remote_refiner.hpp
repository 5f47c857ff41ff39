#pragma once

#include <atomic>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "imf/pairgen/refiner.hpp"

namespace imf::remote {

/// Chat-completions endpoint used for RefinePrompt. The API key is read from
/// the named environment variable at call time and never stored.
struct RemoteRefinerConfig {
  std::string base_url;  // scheme://host[:port][/prefix]
  std::string api_key_env = "IMF_REFINER_API_KEY";
  std::string model = "gpt-4o-mini";
  double timeout_seconds = 20.0;
  int max_tokens = 128;

  /// Reads a [remote] table; absent or empty base_url means offline.
  static std::optional<RemoteRefinerConfig> from_json(const nlohmann::json& j);
};

/// Connection attempts made by any RemoteRefiner in this process.
std::size_t connection_attempts();

/// The fixed instruction sent to the endpoint.
std::string refinement_instruction(std::string_view x_i, std::string_view y, std::string_view y_1);

/// Refiner backed by a remote LLM. Transport errors, HTTP errors and malformed
/// bodies fall back to the builtin refiner and report through `warn`.
class RemoteRefiner : public pairgen::Refiner {
 public:
  using WarnFn = std::function<void(const std::string&)>;

  RemoteRefiner(RemoteRefinerConfig config, pairgen::BuiltinRefiner fallback, WarnFn warn = {});

  std::string refine(std::string_view x_i, std::string_view y, std::string_view y_1) const override;

 private:
  RemoteRefinerConfig config_;
  pairgen::BuiltinRefiner fallback_;
  WarnFn warn_;
};

}  // namespace imf::remote
