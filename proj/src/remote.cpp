#include "memograph/remote.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "memograph/errors.hpp"

namespace memograph {

namespace {

std::mutex g_factory_mutex;
TransportFactory g_factory;

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw TransportError("invalid endpoint url '" + url + "'");
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::string HttpTransport::post(const HttpRequest& request) {
  SplitUrl parts = split_url(request.url);
  httplib::Client client(parts.origin);
  if (!client.is_valid()) {
    throw TransportError("unsupported endpoint '" + parts.origin + "'");
  }
  client.set_connection_timeout(request.timeout);
  client.set_read_timeout(request.timeout);
  client.set_write_timeout(request.timeout);

  httplib::Headers headers;
  for (const auto& [k, v] : request.headers) headers.emplace(k, v);

  auto result = client.Post(parts.path, headers, request.body.dump(),
                            "application/json");
  if (!result) {
    throw TransportError("request to " + request.url + " failed: " +
                         httplib::to_string(result.error()));
  }
  if (result->status < 200 || result->status >= 300) {
    throw TransportError("request to " + request.url + " returned HTTP " +
                         std::to_string(result->status));
  }
  return result->body;
}

std::string FailingTransport::post(const HttpRequest& request) {
  ++attempts_;
  throw TransportError("network access disabled (attempted " + request.url +
                       ")");
}

std::shared_ptr<JsonTransport> make_default_transport() {
  std::lock_guard lock(g_factory_mutex);
  if (g_factory) return g_factory();
  return std::make_shared<HttpTransport>();
}

void set_transport_factory(TransportFactory factory) {
  std::lock_guard lock(g_factory_mutex);
  g_factory = std::move(factory);
}

void reset_transport_factory() { set_transport_factory(nullptr); }

void sleep_for(const RetryPolicy& policy, std::chrono::milliseconds delay) {
  if (policy.sleep) {
    policy.sleep(delay);
  } else {
    std::this_thread::sleep_for(delay);
  }
}

InflightLimiter::InflightLimiter(int capacity) : available_(capacity) {
  if (capacity < 1) throw ArgumentError("in-flight cap must be >= 1");
}

InflightLimiter::Slot::Slot(InflightLimiter& owner) : owner_(owner) {
  std::unique_lock lock(owner_.mutex_);
  owner_.cv_.wait(lock, [this] { return owner_.available_ > 0; });
  --owner_.available_;
}

InflightLimiter::Slot::~Slot() {
  {
    std::lock_guard lock(owner_.mutex_);
    ++owner_.available_;
  }
  owner_.cv_.notify_one();
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* value = std::getenv(name);
  return value != nullptr && *value != '\0' ? std::string(value) : fallback;
}

}  // namespace memograph
