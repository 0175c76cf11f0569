#include "hoikit/refine/mock_server.h"

#include "hoikit/digest.h"
#include "hoikit/error.h"

#include <httplib.h>

#include <fstream>

namespace hoikit::refine {

MockVlmServer::MockVlmServer(nlohmann::json script) : script_(std::move(script)), server_(std::make_unique<httplib::Server>()) {
  if (!script_.is_object()) throw InvalidArgument("mock server script must be a JSON object");
  server_->Post(R"(/v1/chat/completions)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string hash = request_hash(req.body);
    nlohmann::json step;
    {
      std::lock_guard lock(mutex_);
      requests_.push_back(req.body);
      const nlohmann::json* steps = nullptr;
      std::string key = hash;
      if (script_.contains("responses") && script_["responses"].contains(hash)) {
        steps = &script_["responses"][hash];
      } else if (script_.contains("default")) {
        steps = &script_["default"];
        key = "default";
      }
      if (steps == nullptr || !steps->is_array() || steps->empty()) {
        res.status = 404;
        res.set_content("no scripted response for " + hash, "text/plain");
        return;
      }
      std::size_t& cur = cursor_[key];
      step = (*steps)[std::min(cur, steps->size() - 1)];
      ++cur;
    }
    if (step.contains("delay_ms"))
      std::this_thread::sleep_for(std::chrono::milliseconds(step["delay_ms"].get<long>()));
    res.status = step.value("status", 200);
    if (step.contains("body")) {
      res.set_content(step["body"].get<std::string>(), "application/json");
    } else if (step.contains("content")) {
      const nlohmann::json reply = {
          {"id", "mock"},
          {"object", "chat.completion"},
          {"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", step["content"]}}},
                        {"finish_reason", "stop"}}}}};
      res.set_content(reply.dump(), "application/json");
    }
  });
  port_ = server_->bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw IoError("mock server: cannot bind a local port");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

MockVlmServer MockVlmServer::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("mock server: cannot open " + path.string());
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError("mock server: malformed script " + path.string());
  return MockVlmServer(j);
}

MockVlmServer::~MockVlmServer() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockVlmServer::base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

std::vector<std::string> MockVlmServer::requests() const {
  std::lock_guard lock(mutex_);
  return requests_;
}

std::string MockVlmServer::request_hash(const std::string& body) { return sha256_hex(body); }

}  // namespace hoikit::refine
