#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "memograph/embedding.hpp"
#include "memograph/taskgraph.hpp"

namespace memograph {

// Row-major matrix of similarities in [0, 1]. Rows are query-side items,
// columns memory-side items.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  // Throws ArgumentError if the size is wrong or an entry leaves [0, 1].
  SimilarityMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  std::span<const double> entries() const { return entries_; }

  SimilarityMatrix transposed() const;

  friend bool operator==(const SimilarityMatrix&, const SimilarityMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

struct MatchedPair {
  std::size_t row = 0;
  std::size_t col = 0;
  double similarity = 0.0;

  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

struct MatchAssignment {
  std::vector<MatchedPair> pairs;  // ascending by row
  std::vector<std::size_t> unmatched_rows;
  std::vector<std::size_t> unmatched_cols;

  double total() const;
};

struct MatchWeights {
  double alpha = 0.4;  // nodes
  double beta = 0.3;   // links
  double gamma = 0.3;  // instruction

  // Nonnegative and summing to 1 within 1e-9, else ArgumentError.
  void validate() const;
};

enum class ScoringMode {
  kMatchedOverMax,  // sum of matched similarities / max(|query|, |memory|)
  kMatrixMean,      // mean of every thresholded entry
};

std::string to_string(ScoringMode mode);
ScoringMode scoring_mode_from_string(const std::string& text);

inline constexpr double kDefaultTau = 0.5;

struct MatchOptions {
  MatchWeights weights;
  double tau = kDefaultTau;
  ScoringMode mode = ScoringMode::kMatchedOverMax;

  void validate() const;
};

struct InstructionSimilarity {
  double value = 1.0;
  // Exactly one side had an instruction; the fused score drops the
  // instruction term.
  bool one_sided = false;
};

// Both present: clamped cosine of the encoded texts. Both absent: 1.
// Exactly one absent: 0 with one_sided set.
InstructionSimilarity instruction_similarity(
    const std::optional<std::string>& query,
    const std::optional<std::string>& memory, Encoder& encoder);

SimilarityMatrix pairwise_similarity(std::span<const EmbeddingVector> query,
                                     std::span<const EmbeddingVector> memory);

// Zeroes entries below tau; entries equal to tau survive.
SimilarityMatrix threshold_filter(const SimilarityMatrix& m, double tau);

// Thresholds, zero-pads to square, and solves the maximum-similarity
// one-to-one assignment exactly. Pairs that end at similarity 0 are
// reported as unmatched. Ties resolve to the lexicographically smallest
// assignment.
MatchAssignment bipartite_match(const SimilarityMatrix& m, double tau);

// `thresholded` is required for kMatrixMean and ignored otherwise.
double component_score(const MatchAssignment& assignment, std::size_t n_query,
                       std::size_t n_memory, ScoringMode mode,
                       const SimilarityMatrix* thresholded = nullptr);

// With a one-sided instruction, gamma's mass moves to alpha and beta in
// proportion. If alpha and beta are both zero they split it evenly.
MatchWeights effective_weights(const MatchWeights& weights, bool one_sided);

// alpha*s_n + beta*s_l + gamma*s_i, kept inside [min, max] of the
// components against rounding.
double fuse_scores(const MatchWeights& weights, double s_n, double s_l, double s_i);

struct MatchScore {
  double s_n = 0.0;
  double s_l = 0.0;
  double s_i = 0.0;
  double s_w = 0.0;
  MatchAssignment node_assignment;  // indices into canonical node order
  MatchAssignment link_assignment;  // indices into canonical link order
  MatchWeights weights;             // effective weights used for s_w
  EpisodeId memory_episode_id = 0;
};

MatchScore match_graphs(const TaskGraph& query, const TaskGraph& memory,
                        const MatchOptions& options, Encoder& encoder);

// Scores every episode, sorts by s_w descending then episode id ascending,
// and keeps the first k.
std::vector<MatchScore> rank_memory(const TaskGraph& query,
                                    std::span<const EpisodeGraph> memory,
                                    const MatchOptions& options, std::size_t k,
                                    Encoder& encoder);

// {"query_digest", "results": [{"episode_id", "s_n", "s_l", "s_i", "s_w",
//   "node_pairs", "link_pairs"}]}; pairs are [row, col, similarity].
nlohmann::ordered_json match_report(const TaskGraph& query,
                                    std::span<const MatchScore> results);

}  // namespace memograph
