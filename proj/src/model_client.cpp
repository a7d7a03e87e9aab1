#include "memograph/model_client.hpp"

#include "memograph/errors.hpp"

namespace memograph {

ModelClientConfig ModelClientConfig::with_environment() const {
  ModelClientConfig out = *this;
  if (out.endpoint.empty()) out.endpoint = env_or("MEMOGRAPH_VLM_URL");
  if (out.credentials.empty()) out.credentials = env_or("MEMOGRAPH_VLM_KEY");
  return out;
}

void ModelClientConfig::validate() const {
  if (endpoint.empty()) {
    throw ArgumentError("remote model requires an endpoint (MEMOGRAPH_VLM_URL)");
  }
  if (retry.retries < 0) throw ArgumentError("retry count must be >= 0");
  if (max_inflight < 1) throw ArgumentError("in-flight cap must be >= 1");
}

ModelClient::ModelClient(ModelClientConfig config,
                         std::shared_ptr<JsonTransport> transport)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      limiter_(config_.max_inflight) {
  config_.validate();
  if (!transport_) throw ArgumentError("model client requires a transport");
}

std::string ModelClient::post(const nlohmann::json& payload) {
  HttpRequest request;
  request.url = config_.endpoint;
  request.body = payload;
  if (!config_.model.empty() && !request.body.contains("model")) {
    request.body["model"] = config_.model;
  }
  request.timeout = config_.timeout;
  if (!config_.credentials.empty()) {
    request.headers.emplace_back("Authorization", "Bearer " + config_.credentials);
  }
  InflightLimiter::Slot slot(limiter_);
  return transport_->post(request);
}

}  // namespace memograph
