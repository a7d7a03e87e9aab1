#pragma once

#include <functional>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "memograph/remote.hpp"

namespace memograph {

// Connection settings for a remote vision-language model endpoint.
struct ModelClientConfig {
  std::string endpoint;
  std::string credentials;
  std::string model;
  std::chrono::milliseconds timeout{30000};
  RetryPolicy retry;
  int max_inflight = 4;

  // Fills endpoint/credentials from MEMOGRAPH_VLM_URL / MEMOGRAPH_VLM_KEY
  // when unset.
  ModelClientConfig with_environment() const;
  void validate() const;
};

// Thin client that posts a structured-output request and hands the raw
// response text to a caller-supplied validator. A response that fails
// validation is retried like a transport failure.
class ModelClient {
 public:
  ModelClient(ModelClientConfig config, std::shared_ptr<JsonTransport> transport);

  // One request, no retry.
  std::string post(const nlohmann::json& payload);

  // Posts and validates up to 1 + retries times. `on_reject` sees each raw
  // response that failed validation. The last error is rethrown.
  template <class T>
  T request(const nlohmann::json& payload,
            const std::function<T(const std::string&)>& validate,
            const std::function<void(const std::string&)>& on_reject = {}) {
    return with_retries(config_.retry, [&]() -> T {
      const std::string raw = post(payload);
      try {
        return validate(raw);
      } catch (const Error&) {
        if (on_reject) on_reject(raw);
        throw;
      }
    });
  }

  const ModelClientConfig& config() const { return config_; }

 private:
  ModelClientConfig config_;
  std::shared_ptr<JsonTransport> transport_;
  InflightLimiter limiter_;
};

}  // namespace memograph
