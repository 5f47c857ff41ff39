#include "imf/remote/remote_refiner.hpp"

#include <cstdlib>
#include <iostream>

#include <httplib.h>

#include "imf/common/error.hpp"

namespace imf::remote {
namespace {

std::atomic<std::size_t> g_attempts{0};

// "https://host:port/prefix" -> ("https://host:port", "/prefix")
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  const auto path = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path == std::string::npos) return {url, ""};
  std::string prefix = url.substr(path);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, path), prefix};
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n\"");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n\"");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::optional<RemoteRefinerConfig> RemoteRefinerConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) return std::nullopt;
  RemoteRefinerConfig c;
  try {
    c.base_url = j.value("base_url", std::string());
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.model = j.value("model", c.model);
    c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
    c.max_tokens = j.value("max_tokens", c.max_tokens);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("config", std::string("remote refiner: ") + e.what());
  }
  if (c.base_url.empty()) return std::nullopt;
  return c;
}

std::size_t connection_attempts() { return g_attempts.load(); }

std::string refinement_instruction(std::string_view x_i, std::string_view y, std::string_view y_1) {
  std::string s;
  s += "You revise questions. A question should lead a reader naturally toward the target answer ";
  s += "without the answer being the only plausible reply.\n";
  s += "Current question: ";
  s += x_i;
  s += "\nTarget answer: ";
  s += y;
  s += "\nAnswer the current question actually produced: ";
  s += y_1;
  s += "\nRewrite the question so the produced answer moves closer in topic to the target answer ";
  s += "while staying a natural question. Reply with the revised question only.";
  return s;
}

RemoteRefiner::RemoteRefiner(RemoteRefinerConfig config, pairgen::BuiltinRefiner fallback, WarnFn warn)
    : config_(std::move(config)), fallback_(fallback), warn_(std::move(warn)) {
  if (!warn_) warn_ = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
}

std::string RemoteRefiner::refine(std::string_view x_i, std::string_view y, std::string_view y_1) const {
  const auto [origin, prefix] = split_url(config_.base_url);
  nlohmann::json body = {{"model", config_.model},
                         {"max_tokens", config_.max_tokens},
                         {"temperature", 0},
                         {"messages", {{{"role", "user"}, {"content", refinement_instruction(x_i, y, y_1)}}}}};
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  std::string failure;
  try {
    httplib::Client client(origin);
    const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    ++g_attempts;
    const auto res = client.Post(prefix + "/v1/chat/completions", headers, body.dump(), "application/json");
    if (!res) {
      failure = "transport error: " + httplib::to_string(res.error());
    } else if (res->status != 200) {
      failure = "HTTP status " + std::to_string(res->status);
    } else {
      const auto reply = nlohmann::json::parse(res->body, nullptr, false);
      if (reply.is_discarded() || !reply.contains("choices") || !reply["choices"].is_array() ||
          reply["choices"].empty() || !reply["choices"][0].contains("message") ||
          !reply["choices"][0]["message"].contains("content") ||
          !reply["choices"][0]["message"]["content"].is_string()) {
        failure = "malformed response body";
      } else {
        std::string text = trim(reply["choices"][0]["message"]["content"].get<std::string>());
        if (!text.empty()) return text;
        failure = "empty completion";
      }
    }
  } catch (const std::exception& e) {
    failure = e.what();
  }
  warn_("remote refiner at " + config_.base_url + " failed (" + failure + "); using builtin refiner");
  return fallback_.refine(x_i, y, y_1);
}

}  // namespace imf::remote
