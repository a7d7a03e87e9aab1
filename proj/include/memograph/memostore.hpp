#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "memograph/taskgraph.hpp"

namespace memograph {

// An episode before the store assigns its id.
struct EpisodeDraft {
  TaskGraph graph;
  ActionRecord action;
  OutcomeRecord outcome;
  std::int64_t created_at = 0;
};

// Current wall-clock time in integer milliseconds UTC.
std::int64_t now_millis();

struct SkillStats {
  std::size_t episodes = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;

  friend bool operator==(const SkillStats&, const SkillStats&) = default;
};

struct RetrieveOptions {
  // Keep only episodes whose outcome status is success.
  bool successful_only = false;
};

// Append-only episode memory. Ids start at 1 and increase by one per
// stored episode. When a storage path is attached, every store appends one
// line to the file and flushes it before returning.
//
// Readers take a shared lock and receive copies, so a retrieved snapshot is
// unaffected by later stores. Writers are serialized.
class MemoGraphStore {
 public:
  MemoGraphStore() = default;

  // Opens (or creates) a line-delimited file and loads its records; later
  // stores are appended to it.
  static MemoGraphStore open(const std::filesystem::path& path);

  // Reads a persisted file without attaching it for writes. Throws
  // ParseError naming the 1-based line of the first bad record, IoError if
  // the file cannot be read.
  static MemoGraphStore load(const std::filesystem::path& path);

  MemoGraphStore(MemoGraphStore&& other) noexcept;
  MemoGraphStore& operator=(MemoGraphStore&& other) noexcept;
  MemoGraphStore(const MemoGraphStore&) = delete;
  MemoGraphStore& operator=(const MemoGraphStore&) = delete;

  // Validates, assigns the next id, and appends. On any failure the store
  // is left unchanged.
  EpisodeId store(const EpisodeDraft& draft);

  // All-or-nothing batch: every draft is validated before anything is
  // written, and the file receives all lines in one write.
  std::vector<EpisodeId> store_batch(const std::vector<EpisodeDraft>& drafts);

  std::vector<EpisodeGraph> retrieve_all(const RetrieveOptions& options = {}) const;
  EpisodeGraph get(EpisodeId id) const;
  std::size_t count() const;
  std::map<std::string, SkillStats> stats() const;

  // Writes every record to `path` (replacing it) and returns the count.
  std::size_t persist(const std::filesystem::path& path) const;

  const std::optional<std::filesystem::path>& storage_path() const {
    return storage_path_;
  }

 private:
  std::vector<EpisodeGraph> prepare(const std::vector<EpisodeDraft>& drafts) const;
  void append_lines(const std::vector<EpisodeGraph>& episodes) const;

  mutable std::shared_mutex mutex_;
  std::vector<EpisodeGraph> episodes_;
  EpisodeId next_id_ = 1;
  std::optional<std::filesystem::path> storage_path_;
};

}  // namespace memograph
