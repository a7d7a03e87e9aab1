#include "memograph/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <mutex>
#include <sstream>

#include "memograph/errors.hpp"
#include "memograph/log.hpp"

namespace memograph {

namespace {

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [-1, 1) using the top 53 bits; exact in IEEE double.
double unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-52 - 1.0;
}

bool word_byte(unsigned char c) { return c >= 0x80 || std::isalnum(c) != 0; }

}  // namespace

// ---------------------------------------------------------------------------

EmbeddingVector EmbeddingVector::normalized(std::vector<double> values) {
  double sq = 0.0;
  for (double v : values) sq += v * v;
  const double n = std::sqrt(sq);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw ArgumentError("cannot normalize a zero or non-finite vector");
  }
  for (double& v : values) v /= n;
  return EmbeddingVector(std::move(values));
}

EmbeddingVector EmbeddingVector::from_unit(std::vector<double> values) {
  EmbeddingVector v(std::move(values));
  if (std::abs(v.norm() - 1.0) > kUnitNormTolerance) {
    throw ArgumentError("embedding is not unit length");
  }
  return v;
}

double EmbeddingVector::norm() const {
  double sq = 0.0;
  for (double v : values_) sq += v * v;
  return std::sqrt(sq);
}

EmbeddingVector EmbeddingVector::operator-() const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(),
                 [](double v) { return -v; });
  return EmbeddingVector(std::move(out));
}

double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dimension() != v.dimension()) {
    throw ArgumentError("embedding dimension mismatch: " +
                        std::to_string(u.dimension()) + " vs " +
                        std::to_string(v.dimension()));
  }
  // Identical vectors are exactly similar; the dot product may round below 1.
  if (u == v) return 1.0;
  auto a = u.values();
  auto b = v.values();
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return std::clamp(dot, -1.0, 1.0);
}

double normalized_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
  return std::max(0.0, cosine_similarity(u, v));
}

std::vector<EmbeddingVector> Encoder::encode_batch(
    const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(encode(t));
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (word_byte(c)) {
      current.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

DeterministicEncoder::DeterministicEncoder(std::size_t dimension)
    : dimension_(dimension) {
  if (dimension < 8) throw ArgumentError("encoder dimension must be >= 8");
}

EmbeddingVector DeterministicEncoder::encode(const std::string& text) {
  std::vector<std::string> tokens = tokenize(text);
  if (tokens.empty()) {
    throw ArgumentError("cannot encode text without word characters: '" +
                        text + "'");
  }
  // Sorted so that the floating-point sum does not depend on word order.
  std::sort(tokens.begin(), tokens.end());
  std::vector<double> acc(dimension_, 0.0);
  for (const auto& token : tokens) {
    const std::uint64_t seed = fnv1a64(token);
    for (std::size_t j = 0; j < dimension_; ++j) {
      acc[j] += unit_interval(splitmix64(seed + 0x632be59bd9b4e019ULL * (j + 1)));
    }
  }
  return EmbeddingVector::normalized(std::move(acc));
}

// ---------------------------------------------------------------------------

void EncoderConfig::validate() const {
  if (dimension < 8) throw ArgumentError("encoder dimension must be >= 8");
  if (kind == EncoderKind::kRemote && endpoint.empty()) {
    throw ArgumentError(
        "remote encoder requires an endpoint (MEMOGRAPH_ENCODER_URL)");
  }
}

EncoderConfig EncoderConfig::with_environment() const {
  EncoderConfig out = *this;
  if (out.endpoint.empty()) out.endpoint = env_or("MEMOGRAPH_ENCODER_URL");
  if (out.credentials.empty()) out.credentials = env_or("MEMOGRAPH_ENCODER_KEY");
  return out;
}

RemoteEncoder::RemoteEncoder(EncoderConfig config,
                             std::shared_ptr<JsonTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  config_.validate();
  if (!transport_) throw ArgumentError("remote encoder requires a transport");
}

EmbeddingVector RemoteEncoder::encode(const std::string& text) {
  return encode_batch({text}).front();
}

std::vector<EmbeddingVector> RemoteEncoder::encode_batch(
    const std::vector<std::string>& texts) {
  for (const auto& t : texts) {
    if (tokenize(t).empty()) throw ArgumentError("cannot encode empty text");
  }
  if (texts.empty()) return {};
  return with_retries(config_.retry, [&] { return request_once(texts); });
}

std::vector<EmbeddingVector> RemoteEncoder::request_once(
    const std::vector<std::string>& texts) {
  HttpRequest request;
  request.url = config_.endpoint;
  request.body = {{"texts", texts}};
  request.timeout = config_.timeout;
  if (!config_.credentials.empty()) {
    request.headers.emplace_back("Authorization",
                                 "Bearer " + config_.credentials);
  }
  const std::string raw = transport_->post(request);

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::parse_error&) {
    throw TransportError("encoder returned a non-JSON response");
  }
  if (!doc.is_object() || !doc.contains("vectors") || !doc["vectors"].is_array() ||
      doc["vectors"].size() != texts.size()) {
    throw TransportError("encoder response lacks a matching 'vectors' array");
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto& row = doc["vectors"][i];
    if (!row.is_array() || row.size() != config_.dimension) {
      throw TransportError("encoder vector " + std::to_string(i) +
                           " has the wrong dimension");
    }
    std::vector<double> values;
    values.reserve(row.size());
    for (const auto& x : row) {
      if (!x.is_number()) throw TransportError("encoder vector holds a non-number");
      values.push_back(x.get<double>());
    }
    double sq = 0.0;
    for (double v : values) sq += v * v;
    if (std::abs(std::sqrt(sq) - 1.0) > kUnitNormTolerance) {
      log_warning("encoder returned a non-unit vector for '" + texts[i] +
                  "'; renormalized");
    }
    try {
      out.push_back(EmbeddingVector::normalized(std::move(values)));
    } catch (const ArgumentError& e) {
      throw TransportError(std::string("encoder vector unusable: ") + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

CachingEncoder::CachingEncoder(std::shared_ptr<Encoder> inner,
                               std::size_t capacity)
    : inner_(std::move(inner)), capacity_(capacity) {
  if (!inner_) throw ArgumentError("caching encoder requires an inner encoder");
}

EmbeddingVector CachingEncoder::encode(const std::string& text) {
  if (capacity_ == 0) return inner_->encode(text);
  {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(text);
    if (it != entries_.end()) {
      hits_.fetch_add(1, std::memory_order_relaxed);
      return it->second;
    }
  }
  EmbeddingVector value = inner_->encode(text);
  std::unique_lock lock(mutex_);
  if (entries_.emplace(text, value).second) {
    order_.push_back(text);
    while (order_.size() > capacity_) {
      entries_.erase(order_.front());
      order_.pop_front();
    }
  }
  return value;
}

std::size_t CachingEncoder::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::size_t CachingEncoder::hits() const {
  return hits_.load(std::memory_order_relaxed);
}

std::shared_ptr<Encoder> make_encoder(const EncoderConfig& config) {
  config.validate();
  std::shared_ptr<Encoder> base;
  if (config.kind == EncoderKind::kDeterministic) {
    base = std::make_shared<DeterministicEncoder>(config.dimension);
  } else {
    base = std::make_shared<RemoteEncoder>(config, make_default_transport());
  }
  if (config.cache_capacity == 0) return base;
  return std::make_shared<CachingEncoder>(std::move(base), config.cache_capacity);
}

// ---------------------------------------------------------------------------

std::string node_text(const NodeEntity& node) {
  std::string out = node.label;
  for (const auto& kv : node.attributes) {
    out += "; ";
    out += kv.key;
    out += '=';
    out += kv.value;
  }
  return out;
}

std::string link_text(const TaskGraph& graph, const LinkRelation& link) {
  const NodeEntity* source = graph.find_node(link.source_id);
  const NodeEntity* target = graph.find_node(link.target_id);
  if (source == nullptr || target == nullptr) {
    throw ArgumentError("link " + link.source_id + "->" + link.target_id +
                        " has an unresolved endpoint");
  }
  return source->label + " " + link.relation + " " + target->label;
}

GraphEmbeddings embed_graph_parts(const TaskGraph& graph, Encoder& encoder) {
  const TaskGraph canonical = canonicalize(graph);
  auto encode = [&encoder](const std::string& text) {
    try {
      return encoder.encode(text);
    } catch (const TransportError& e) {
      throw TransportError("encoding '" + text + "': " + e.what());
    }
  };
  GraphEmbeddings out;
  out.nodes.reserve(canonical.nodes.size());
  for (const auto& n : canonical.nodes) out.nodes.push_back(encode(node_text(n)));
  out.links.reserve(canonical.links.size());
  for (const auto& l : canonical.links) {
    out.links.push_back(encode(link_text(canonical, l)));
  }
  return out;
}

}  // namespace memograph
