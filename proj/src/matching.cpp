#include "memograph/matching.hpp"

#include <algorithm>
#include <cmath>

#include "memograph/assignment.hpp"
#include "memograph/errors.hpp"

namespace memograph {

namespace {

void check_tau(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw ArgumentError("threshold tau must lie in [0, 1]");
  }
}

struct PreparedGraph {
  GraphEmbeddings parts;
  std::optional<std::string> instruction;
};

PreparedGraph prepare(const TaskGraph& graph, Encoder& encoder) {
  return {embed_graph_parts(graph, encoder), graph.instruction};
}

double score_component(const std::vector<EmbeddingVector>& query,
                       const std::vector<EmbeddingVector>& memory,
                       const MatchOptions& options, MatchAssignment& assignment) {
  const SimilarityMatrix raw = pairwise_similarity(query, memory);
  assignment = bipartite_match(raw, options.tau);
  if (options.mode == ScoringMode::kMatrixMean) {
    const SimilarityMatrix filtered = threshold_filter(raw, options.tau);
    return component_score(assignment, query.size(), memory.size(), options.mode,
                           &filtered);
  }
  return component_score(assignment, query.size(), memory.size(), options.mode);
}

MatchScore score_prepared(const PreparedGraph& query, const PreparedGraph& memory,
                          const MatchOptions& options, Encoder& encoder) {
  MatchScore score;
  const InstructionSimilarity si =
      instruction_similarity(query.instruction, memory.instruction, encoder);
  score.s_i = si.value;
  score.s_n = score_component(query.parts.nodes, memory.parts.nodes, options,
                              score.node_assignment);
  score.s_l = score_component(query.parts.links, memory.parts.links, options,
                              score.link_assignment);
  score.weights = effective_weights(options.weights, si.one_sided);
  score.s_w = fuse_scores(score.weights, score.s_n, score.s_l, score.s_i);
  return score;
}

}  // namespace

// ---------------------------------------------------------------------------

SimilarityMatrix::SimilarityMatrix(std::size_t rows, std::size_t cols,
                                   std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows * cols) {
    throw ArgumentError("similarity matrix entry count does not match shape");
  }
  for (double e : entries_) {
    if (!(e >= 0.0 && e <= 1.0)) {
      throw ArgumentError("similarity entries must lie in [0, 1]");
    }
  }
}

SimilarityMatrix SimilarityMatrix::transposed() const {
  std::vector<double> t(entries_.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t[c * rows_ + r] = at(r, c);
  }
  return SimilarityMatrix(cols_, rows_, std::move(t));
}

double MatchAssignment::total() const {
  double sum = 0.0;
  for (const auto& p : pairs) sum += p.similarity;
  return sum;
}

void MatchWeights::validate() const {
  if (!(alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0)) {
    throw ArgumentError("match weights must be nonnegative");
  }
  if (std::abs(alpha + beta + gamma - 1.0) > 1e-9) {
    throw ArgumentError("match weights must sum to 1");
  }
}

std::string to_string(ScoringMode mode) {
  return mode == ScoringMode::kMatrixMean ? "matrix_mean" : "matched_over_max";
}

ScoringMode scoring_mode_from_string(const std::string& text) {
  if (text == "matched_over_max") return ScoringMode::kMatchedOverMax;
  if (text == "matrix_mean") return ScoringMode::kMatrixMean;
  throw ArgumentError("unknown scoring mode '" + text + "'");
}

void MatchOptions::validate() const {
  weights.validate();
  check_tau(tau);
}

// ---------------------------------------------------------------------------

InstructionSimilarity instruction_similarity(
    const std::optional<std::string>& query,
    const std::optional<std::string>& memory, Encoder& encoder) {
  if (!query && !memory) return {1.0, false};
  if (!query || !memory) return {0.0, true};
  return {normalized_similarity(encoder.encode(*query), encoder.encode(*memory)),
          false};
}

SimilarityMatrix pairwise_similarity(std::span<const EmbeddingVector> query,
                                     std::span<const EmbeddingVector> memory) {
  std::vector<double> entries;
  entries.reserve(query.size() * memory.size());
  for (const auto& q : query) {
    for (const auto& m : memory) entries.push_back(normalized_similarity(q, m));
  }
  return SimilarityMatrix(query.size(), memory.size(), std::move(entries));
}

SimilarityMatrix threshold_filter(const SimilarityMatrix& m, double tau) {
  check_tau(tau);
  std::vector<double> out(m.entries().begin(), m.entries().end());
  for (double& e : out) {
    if (e < tau) e = 0.0;
  }
  return SimilarityMatrix(m.rows(), m.cols(), std::move(out));
}

MatchAssignment bipartite_match(const SimilarityMatrix& m, double tau) {
  const SimilarityMatrix filtered = threshold_filter(m, tau);
  const std::size_t rows = filtered.rows();
  const std::size_t cols = filtered.cols();
  const std::size_t n = std::max(rows, cols);

  std::vector<double> padded(n * n, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) padded[r * n + c] = filtered.at(r, c);
  }
  const SquareAssignment solved = solve_max_weight_assignment(padded, n);

  MatchAssignment out;
  std::vector<char> col_matched(cols, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t c = solved.row_to_col[r];
    if (c < cols && filtered.at(r, c) > 0.0) {
      out.pairs.push_back({r, c, filtered.at(r, c)});
      col_matched[c] = 1;
    } else {
      out.unmatched_rows.push_back(r);
    }
  }
  for (std::size_t c = 0; c < cols; ++c) {
    if (!col_matched[c]) out.unmatched_cols.push_back(c);
  }
  return out;
}

double component_score(const MatchAssignment& assignment, std::size_t n_query,
                       std::size_t n_memory, ScoringMode mode,
                       const SimilarityMatrix* thresholded) {
  if (n_query == 0 && n_memory == 0) return 1.0;
  if (n_query == 0 || n_memory == 0) return 0.0;
  switch (mode) {
    case ScoringMode::kMatchedOverMax:
      return std::clamp(
          assignment.total() / static_cast<double>(std::max(n_query, n_memory)),
          0.0, 1.0);
    case ScoringMode::kMatrixMean: {
      if (thresholded == nullptr || thresholded->rows() != n_query ||
          thresholded->cols() != n_memory) {
        throw ArgumentError("matrix_mean scoring needs the thresholded matrix");
      }
      double sum = 0.0;
      for (double e : thresholded->entries()) sum += e;
      return std::clamp(sum / static_cast<double>(n_query * n_memory), 0.0, 1.0);
    }
  }
  throw ArgumentError("unknown scoring mode");
}

MatchWeights effective_weights(const MatchWeights& weights, bool one_sided) {
  if (!one_sided) return weights;
  const double mass = weights.alpha + weights.beta;
  if (mass <= 0.0) return {0.5, 0.5, 0.0};
  return {weights.alpha / mass, weights.beta / mass, 0.0};
}

double fuse_scores(const MatchWeights& weights, double s_n, double s_l,
                   double s_i) {
  const double fused = weights.alpha * s_n + weights.beta * s_l + weights.gamma * s_i;
  // Components with zero weight do not bound the combination.
  double lo = 1.0, hi = 0.0;
  const double parts[3][2] = {{weights.alpha, s_n}, {weights.beta, s_l},
                              {weights.gamma, s_i}};
  for (const auto& [w, s] : parts) {
    if (w > 0.0) {
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
  }
  if (lo > hi) return fused;
  return std::clamp(fused, lo, hi);
}

MatchScore match_graphs(const TaskGraph& query, const TaskGraph& memory,
                        const MatchOptions& options, Encoder& encoder) {
  options.validate();
  return score_prepared(prepare(query, encoder), prepare(memory, encoder),
                        options, encoder);
}

std::vector<MatchScore> rank_memory(const TaskGraph& query,
                                    std::span<const EpisodeGraph> memory,
                                    const MatchOptions& options, std::size_t k,
                                    Encoder& encoder) {
  options.validate();
  if (k == 0) throw ArgumentError("k must be positive");
  if (memory.empty()) return {};

  const PreparedGraph prepared_query = prepare(query, encoder);
  std::vector<MatchScore> scores;
  scores.reserve(memory.size());
  for (const auto& episode : memory) {
    const std::string where = "episode " + std::to_string(episode.episode_id) + ": ";
    try {
      MatchScore s = score_prepared(prepared_query, prepare(episode.graph, encoder),
                                    options, encoder);
      s.memory_episode_id = episode.episode_id;
      scores.push_back(std::move(s));
    } catch (const TransportError& e) {
      throw TransportError(where + e.what());
    } catch (const ArgumentError& e) {
      throw ArgumentError(where + e.what());
    }
  }
  std::sort(scores.begin(), scores.end(), [](const MatchScore& a, const MatchScore& b) {
    if (a.s_w != b.s_w) return a.s_w > b.s_w;
    return a.memory_episode_id < b.memory_episode_id;
  });
  if (scores.size() > k) scores.resize(k);
  return scores;
}

nlohmann::ordered_json match_report(const TaskGraph& query,
                                    std::span<const MatchScore> results) {
  auto pairs_json = [](const MatchAssignment& a) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& p : a.pairs) arr.push_back({p.row, p.col, p.similarity});
    return arr;
  };
  nlohmann::ordered_json doc;
  doc["query_digest"] = graph_digest(query);
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json item;
    item["episode_id"] = r.memory_episode_id;
    item["s_n"] = r.s_n;
    item["s_l"] = r.s_l;
    item["s_i"] = r.s_i;
    item["s_w"] = r.s_w;
    item["node_pairs"] = pairs_json(r.node_assignment);
    item["link_pairs"] = pairs_json(r.link_assignment);
    arr.push_back(std::move(item));
  }
  doc["results"] = std::move(arr);
  return doc;
}

}  // namespace memograph
