#pragma once

#include "hoikit/refine/tournament.h"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace hoikit::refine {

inline constexpr const char* kApiKeyEnv = "HOIKIT_VLM_API_KEY";

/// Missing or invalid selector configuration, raised before any request.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct VlmConfig {
  /// Requests go to {base_url}/chat/completions.
  std::string base_url;
  std::string model = "gpt-4o";
  /// Name of the environment variable holding the bearer token.
  std::string api_key_env = kApiKeyEnv;
  double timeout_s = 60.0;
  /// Extra attempts after the first on transport errors, HTTP 429 and 5xx.
  int retries = 3;
  /// Wait before retry k (0-based) is backoff_s * 2^k.
  double backoff_s = 1.0;
  /// What the hand should be doing, e.g. "a hand grasping a mug".
  std::string description;

  nlohmann::json to_json() const;
  static VlmConfig from_json(const nlohmann::json& j);
};

/// Instruction text for a group of `count` images.
std::string selection_prompt(std::string_view description, std::size_t count);
/// Follow-up sent once after an unusable reply.
std::string format_reminder(std::size_t count);

/// Drops everything up to the last </think>, then parses the outermost
/// {...} and returns its integer "selection". No range check.
std::optional<long> parse_selection(std::string_view content);

/// Chat-completions selector over HTTP(S). The token is read from the
/// environment at construction; ConfigError if it or base_url is missing.
class VlmSelector : public Selector {
 public:
  explicit VlmSelector(VlmConfig config);
  SelectorReply select(std::span<const Candidate> group) override;
  bool needs_images() const override { return true; }
  std::string name() const override { return "vlm"; }

  /// Request body for the given conversation; exposed for fixtures.
  nlohmann::json request_body(const nlohmann::json& messages) const;
  static nlohmann::json first_message(std::string_view description, std::span<const Candidate> group);

 private:
  // Sends one body, retrying as configured; returns the reply text.
  std::string post(const std::string& body, std::vector<std::string>& log);

  VlmConfig config_;
  std::string token_;
  std::string origin_;
  std::string path_;
};

}  // namespace hoikit::refine
