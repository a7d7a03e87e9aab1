#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "memograph/errors.hpp"

namespace memograph {

struct HttpRequest {
  std::string url;
  nlohmann::json body;
  std::vector<std::pair<std::string, std::string>> headers;
  std::chrono::milliseconds timeout{10000};
};

// Posts a JSON body and returns the raw response text. Implementations throw
// TransportError on connection failure, timeout, or a non-2xx status.
class JsonTransport {
 public:
  virtual ~JsonTransport() = default;
  virtual std::string post(const HttpRequest& request) = 0;
};

// cpp-httplib backed transport. Supports http:// and https:// URLs.
class HttpTransport : public JsonTransport {
 public:
  std::string post(const HttpRequest& request) override;
};

// Refuses every request. Installed in tests and offline runs to prove that
// nothing reaches the network.
class FailingTransport : public JsonTransport {
 public:
  std::string post(const HttpRequest& request) override;
  int attempts() const { return attempts_.load(); }

 private:
  std::atomic<int> attempts_{0};
};

using TransportFactory = std::function<std::shared_ptr<JsonTransport>()>;

// Every remote client obtains its transport here unless one is injected.
// The default factory yields HttpTransport.
std::shared_ptr<JsonTransport> make_default_transport();
void set_transport_factory(TransportFactory factory);
void reset_transport_factory();

struct RetryPolicy {
  int retries = 2;
  std::chrono::milliseconds initial_backoff{250};
  // Injected so tests do not sleep.
  std::function<void(std::chrono::milliseconds)> sleep;
};

void sleep_for(const RetryPolicy& policy, std::chrono::milliseconds delay);

// Runs `attempt` up to 1 + policy.retries times with exponential backoff,
// retrying on any memograph::Error. The last error is rethrown.
template <class Fn>
auto with_retries(const RetryPolicy& policy, Fn&& attempt) -> decltype(attempt()) {
  std::chrono::milliseconds delay = policy.initial_backoff;
  for (int i = 0;; ++i) {
    try {
      return attempt();
    } catch (const Error&) {
      if (i >= policy.retries) throw;
    }
    sleep_for(policy, delay);
    delay *= 2;
  }
}

// Caps concurrent in-flight requests of one client.
class InflightLimiter {
 public:
  explicit InflightLimiter(int capacity);

  class Slot {
   public:
    explicit Slot(InflightLimiter& owner);
    ~Slot();
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    InflightLimiter& owner_;
  };

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  int available_;
};

// Reads an environment variable; empty optional-like string when unset.
std::string env_or(const char* name, const std::string& fallback = {});

}  // namespace memograph
