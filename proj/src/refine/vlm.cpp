#include "hoikit/refine/vlm.h"

#include "hoikit/digest.h"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace hoikit::refine {

nlohmann::json VlmConfig::to_json() const {
  return {{"base_url", base_url},   {"model", model},         {"api_key_env", api_key_env},
          {"timeout_s", timeout_s}, {"retries", retries},     {"backoff_s", backoff_s},
          {"description", description}};
}

VlmConfig VlmConfig::from_json(const nlohmann::json& j) {
  VlmConfig c;
  c.base_url = j.value("base_url", c.base_url);
  c.model = j.value("model", c.model);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  c.timeout_s = j.value("timeout_s", c.timeout_s);
  c.retries = j.value("retries", c.retries);
  c.backoff_s = j.value("backoff_s", c.backoff_s);
  c.description = j.value("description", c.description);
  return c;
}

std::string selection_prompt(std::string_view description, std::size_t count) {
  std::string s;
  s += "You will see " + std::to_string(count) + " rendered images, numbered 1 to " + std::to_string(count) +
       " in the order given. Each shows a hand (skin colored) and an object (blue) from the same camera. ";
  s += "Intended interaction: " + std::string(description) + ".\n";
  s += "Pick the image whose hand placement is the most physically believable for that interaction: ";
  s += "the hand touches the object where it should, does not sink into it, and does not float away from it. ";
  s += "Judge only geometry and contact; colors and shading are not important.\n";
  s += "You may reason first inside <think></think>. Then answer with only a JSON object of the form ";
  s += "{\"selection\": n} where n is an integer from 1 to " + std::to_string(count) + ".";
  return s;
}

std::string format_reminder(std::size_t count) {
  return "Your reply could not be used. Answer with only {\"selection\": n}, n an integer from 1 to " +
         std::to_string(count) + ".";
}

std::optional<long> parse_selection(std::string_view content) {
  const auto close = content.rfind("</think>");
  if (close != std::string_view::npos) content.remove_prefix(close + 8);
  const auto open = content.find('{');
  const auto end = content.rfind('}');
  if (open == std::string_view::npos || end == std::string_view::npos || end < open) return std::nullopt;
  const auto j = nlohmann::json::parse(content.substr(open, end - open + 1), nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("selection")) return std::nullopt;
  const auto& s = j["selection"];
  if (s.is_number_integer()) return s.get<long>();
  if (s.is_number_float() && std::floor(s.get<double>()) == s.get<double>()) return static_cast<long>(s.get<double>());
  return std::nullopt;
}

VlmSelector::VlmSelector(VlmConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw ConfigError("vlm selector: base_url is not set");
  const char* token = std::getenv(config_.api_key_env.c_str());
  if (token == nullptr || *token == '\0')
    throw ConfigError("vlm selector: environment variable " + config_.api_key_env + " is not set");
  token_ = token;
  if (config_.retries < 0 || !(config_.timeout_s > 0.0) || config_.backoff_s < 0.0)
    throw ConfigError("vlm selector: retries, timeout and backoff must be non-negative");
  const auto scheme = config_.base_url.find("://");
  if (scheme == std::string::npos) throw ConfigError("vlm selector: base_url needs a scheme: " + config_.base_url);
  const auto slash = config_.base_url.find('/', scheme + 3);
  origin_ = config_.base_url.substr(0, slash);
  path_ = slash == std::string::npos ? "" : config_.base_url.substr(slash);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/chat/completions";
}

nlohmann::json VlmSelector::first_message(std::string_view description, std::span<const Candidate> group) {
  nlohmann::json content = nlohmann::json::array();
  content.push_back({{"type", "text"}, {"text", selection_prompt(description, group.size())}});
  for (const auto& c : group) {
    if (c.png.empty()) throw InvalidArgument("vlm selector: candidate " + std::to_string(c.id) + " has no image");
    content.push_back(
        {{"type", "image_url"}, {"image_url", {{"url", "data:image/png;base64," + base64_encode(c.png)}}}});
  }
  return {{"role", "user"}, {"content", content}};
}

nlohmann::json VlmSelector::request_body(const nlohmann::json& messages) const {
  return {{"model", config_.model}, {"messages", messages}, {"temperature", 0}};
}

std::string VlmSelector::post(const std::string& body, std::vector<std::string>& log) {
  httplib::Client client(origin_);
  const auto timeout = std::chrono::duration<double>(config_.timeout_s);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_bearer_token_auth(token_);
  const int attempts = config_.retries + 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      const double wait = config_.backoff_s * std::pow(2.0, attempt - 1);
      std::this_thread::sleep_for(std::chrono::duration<double>(wait));
    }
    const auto res = client.Post(path_, body, "application/json");
    std::string what;
    if (!res) {
      what = "transport error: " + httplib::to_string(res.error());
    } else if (res->status == 200) {
      const auto j = nlohmann::json::parse(res->body, nullptr, false);
      if (!j.is_discarded() && j.contains("choices") && j["choices"].is_array() && !j["choices"].empty()) {
        const auto& msg = j["choices"][0].value("message", nlohmann::json::object());
        if (msg.contains("content") && msg["content"].is_string()) {
          log.push_back("attempt " + std::to_string(attempt + 1) + ": HTTP 200");
          return msg["content"].get<std::string>();
        }
      }
      log.push_back("attempt " + std::to_string(attempt + 1) + ": HTTP 200 without message content");
      return {};
    } else if (res->status == 429 || res->status >= 500) {
      what = "HTTP " + std::to_string(res->status);
    } else {
      log.push_back("attempt " + std::to_string(attempt + 1) + ": HTTP " + std::to_string(res->status));
      throw SelectorError("vlm request rejected with HTTP " + std::to_string(res->status), log);
    }
    log.push_back("attempt " + std::to_string(attempt + 1) + ": " + what);
    spdlog::warn("vlm selector: {} (attempt {}/{})", what, attempt + 1, attempts);
  }
  throw SelectorError("vlm request failed after " + std::to_string(attempts) + " attempts", log);
}

SelectorReply VlmSelector::select(std::span<const Candidate> group) {
  if (group.empty()) throw SelectorError("empty group", {});
  SelectorReply out;
  nlohmann::json messages = nlohmann::json::array({first_message(config_.description, group)});
  for (int prompt = 0; prompt < 2; ++prompt) {
    const std::string content = post(request_body(messages).dump(), out.log);
    out.raw = content;
    const auto sel = parse_selection(content);
    if (sel && *sel >= 1 && static_cast<std::size_t>(*sel) <= group.size()) {
      out.choice = static_cast<std::size_t>(*sel - 1);
      return out;
    }
    out.log.push_back(sel ? "selection " + std::to_string(*sel) + " out of range" : "unparseable reply");
    messages.push_back({{"role", "assistant"}, {"content", content}});
    messages.push_back({{"role", "user"}, {"content", format_reminder(group.size())}});
  }
  throw SelectorError("vlm reply unusable after one re-prompt", out.log);
}

}  // namespace hoikit::refine
