#pragma once

#include <atomic>
#include <cstddef>
#include <deque>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "memograph/remote.hpp"
#include "memograph/taskgraph.hpp"

namespace memograph {

// Unit-L2-norm real vector. Only constructible through the factories, which
// enforce the norm.
class EmbeddingVector {
 public:
  // Scales `values` to unit length. Throws ArgumentError on a zero or
  // non-finite vector.
  static EmbeddingVector normalized(std::vector<double> values);

  // Accepts values that are already unit length within 1e-6.
  static EmbeddingVector from_unit(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t dimension() const { return values_.size(); }
  double norm() const;

  EmbeddingVector operator-() const;

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  explicit EmbeddingVector(std::vector<double> values)
      : values_(std::move(values)) {}

  std::vector<double> values_;
};

inline constexpr double kUnitNormTolerance = 1e-6;

// Dot product of two unit vectors, clamped to [-1, 1]; exactly 1 for equal
// vectors.
double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v);

// max(0, cosine), additionally capped at 1 to absorb rounding.
double normalized_similarity(const EmbeddingVector& u, const EmbeddingVector& v);

// Text encoder E(.). Implementations are safe for concurrent calls.
class Encoder {
 public:
  virtual ~Encoder() = default;
  virtual std::size_t dimension() const = 0;
  virtual EmbeddingVector encode(const std::string& text) = 0;
  virtual std::vector<EmbeddingVector> encode_batch(
      const std::vector<std::string>& texts);
};

// Lowercases, collapses whitespace, and tokenizes on non-alphanumerics
// (bytes >= 0x80 count as alphanumeric so UTF-8 words stay whole).
std::vector<std::string> tokenize(const std::string& text);

// Bag-of-words stand-in for a semantic encoder. Each token seeds a fixed
// 64-bit mixer that yields `dimension` reals in [-1, 1]; token vectors are
// summed and normalized. Bit-identical across runs and platforms.
class DeterministicEncoder : public Encoder {
 public:
  explicit DeterministicEncoder(std::size_t dimension = 64);

  std::size_t dimension() const override { return dimension_; }
  EmbeddingVector encode(const std::string& text) override;

 private:
  std::size_t dimension_;
};

enum class EncoderKind { kDeterministic, kRemote };

struct EncoderConfig {
  EncoderKind kind = EncoderKind::kDeterministic;
  std::size_t dimension = 64;
  std::string endpoint;
  std::string credentials;
  std::size_t cache_capacity = 4096;
  std::chrono::milliseconds timeout{10000};
  RetryPolicy retry;

  // Throws ArgumentError unless dimension >= 8 and remote has an endpoint.
  void validate() const;

  // Fills endpoint/credentials from MEMOGRAPH_ENCODER_URL and
  // MEMOGRAPH_ENCODER_KEY when they are not already set.
  EncoderConfig with_environment() const;
};

// Batch client for a remote embedding service.
//   request:  {"texts": [...]}
//   response: {"vectors": [[...], ...]}
// Non-unit vectors are renormalized and a warning is logged.
class RemoteEncoder : public Encoder {
 public:
  RemoteEncoder(EncoderConfig config, std::shared_ptr<JsonTransport> transport);

  std::size_t dimension() const override { return config_.dimension; }
  EmbeddingVector encode(const std::string& text) override;
  std::vector<EmbeddingVector> encode_batch(
      const std::vector<std::string>& texts) override;

 private:
  std::vector<EmbeddingVector> request_once(const std::vector<std::string>& texts);

  EncoderConfig config_;
  std::shared_ptr<JsonTransport> transport_;
};

// Memoizes an inner encoder by exact text. Reads take a shared lock; inserts
// are published under an exclusive lock. Oldest entries are evicted first
// once `capacity` is reached; capacity 0 disables caching.
class CachingEncoder : public Encoder {
 public:
  CachingEncoder(std::shared_ptr<Encoder> inner, std::size_t capacity);

  std::size_t dimension() const override { return inner_->dimension(); }
  EmbeddingVector encode(const std::string& text) override;

  std::size_t size() const;
  std::size_t hits() const;

 private:
  std::shared_ptr<Encoder> inner_;
  std::size_t capacity_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, EmbeddingVector> entries_;
  std::deque<std::string> order_;
  std::atomic<std::size_t> hits_{0};
};

// Builds the configured encoder, wrapped in a cache when capacity > 0.
// Remote encoders take their transport from make_default_transport().
std::shared_ptr<Encoder> make_encoder(const EncoderConfig& config);

// --- Graph textualization -------------------------------------------------

// "label; key=value; key=value" with attributes in the given order.
std::string node_text(const NodeEntity& node);

// "<source label> <relation> <target label>". Endpoints must resolve.
std::string link_text(const TaskGraph& graph, const LinkRelation& link);

struct GraphEmbeddings {
  std::vector<EmbeddingVector> nodes;
  std::vector<EmbeddingVector> links;
};

// Embeds nodes and links of the canonical form of `graph`; output order
// matches canonical order. Transport failures are rethrown with the failing
// text attached.
GraphEmbeddings embed_graph_parts(const TaskGraph& graph, Encoder& encoder);

}  // namespace memograph
