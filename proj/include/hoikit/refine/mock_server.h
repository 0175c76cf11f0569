#pragma once

#include <json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace hoikit::refine {

/// Local chat-completions endpoint that replays a script.
///
/// Script:
///   {"responses": {"<sha256 of request body>": [step, ...]}, "default": [step, ...]}
/// A step is {"content": "..."} (wrapped as a chat completion),
/// {"body": "..."} (sent verbatim) or {"status": 503}, each optionally with
/// "delay_ms". Successive requests with the same hash take successive steps;
/// the last step repeats. Requests with no script entry use "default", or get
/// HTTP 404 when there is none.
class MockVlmServer {
 public:
  explicit MockVlmServer(nlohmann::json script);
  static MockVlmServer from_file(const std::filesystem::path& path);
  ~MockVlmServer();
  MockVlmServer(const MockVlmServer&) = delete;
  MockVlmServer& operator=(const MockVlmServer&) = delete;
  MockVlmServer(MockVlmServer&&) = delete;

  int port() const { return port_; }
  /// http://127.0.0.1:<port>/v1
  std::string base_url() const;
  /// Raw bodies received, in arrival order.
  std::vector<std::string> requests() const;

  static std::string request_hash(const std::string& body);

 private:
  nlohmann::json script_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  mutable std::mutex mutex_;
  std::vector<std::string> requests_;
  std::map<std::string, std::size_t> cursor_;
};

}  // namespace hoikit::refine
