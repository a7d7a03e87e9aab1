#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "memograph/remote.hpp"

#ifndef MEMOGRAPH_FIXTURE_DIR
#error "MEMOGRAPH_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace memograph::testing {

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(MEMOGRAPH_FIXTURE_DIR) / name;
}

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Answers with recorded bodies in order, repeating the last one. Every
// request is kept for inspection.
class ReplayTransport : public JsonTransport {
 public:
  explicit ReplayTransport(std::vector<std::string> bodies) : bodies_(std::move(bodies)) {}

  static std::shared_ptr<ReplayTransport> of_fixtures(const std::vector<std::string>& names) {
    std::vector<std::string> bodies;
    for (const auto& n : names) bodies.push_back(read_fixture(n));
    return std::make_shared<ReplayTransport>(std::move(bodies));
  }

  std::string post(const HttpRequest& request) override {
    std::lock_guard lock(mutex_);
    requests.push_back(request);
    const std::size_t i = std::min(requests.size() - 1, bodies_.size() - 1);
    return bodies_[i];
  }

  std::vector<HttpRequest> requests;

 private:
  std::mutex mutex_;
  std::vector<std::string> bodies_;
};

inline RetryPolicy no_sleep_retry(int retries = 2) {
  RetryPolicy p;
  p.retries = retries;
  p.sleep = [](std::chrono::milliseconds) {};
  return p;
}

}  // namespace memograph::testing
