// Serves a scripted chat-completions endpoint until interrupted.
// Usage: hoikit_mock_vlm script.json
#include "hoikit/refine/mock_server.h"

#include <csignal>
#include <chrono>
#include <iostream>
#include <thread>

namespace {
volatile std::sig_atomic_t stop = 0;
}

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: hoikit_mock_vlm script.json\n";
    return 2;
  }
  try {
    auto server = hoikit::refine::MockVlmServer::from_file(argv[1]);
    std::signal(SIGINT, [](int) { stop = 1; });
    std::signal(SIGTERM, [](int) { stop = 1; });
    std::cout << server.base_url() << std::endl;
    while (!stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    std::cerr << server.requests().size() << " request(s) served\n";
  } catch (const std::exception& e) {
    std::cerr << "hoikit_mock_vlm: " << e.what() << '\n';
    return 1;
  }
}
