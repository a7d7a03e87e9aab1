#include "memograph/memostore.hpp"

#include <chrono>
#include <fstream>
#include <mutex>
#include <sstream>

#include "memograph/errors.hpp"

namespace memograph {

std::int64_t now_millis() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

MemoGraphStore::MemoGraphStore(MemoGraphStore&& other) noexcept {
  std::unique_lock lock(other.mutex_);
  episodes_ = std::move(other.episodes_);
  next_id_ = other.next_id_;
  storage_path_ = std::move(other.storage_path_);
}

MemoGraphStore& MemoGraphStore::operator=(MemoGraphStore&& other) noexcept {
  if (this != &other) {
    std::scoped_lock lock(mutex_, other.mutex_);
    episodes_ = std::move(other.episodes_);
    next_id_ = other.next_id_;
    storage_path_ = std::move(other.storage_path_);
  }
  return *this;
}

MemoGraphStore MemoGraphStore::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open memory file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string content = buffer.str();

  MemoGraphStore store;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    ++line_no;
    const std::size_t end = content.find('\n', pos);
    if (end == std::string::npos) {
      throw ParseError("truncated record (missing line terminator) in " + path.string(),
                       line_no);
    }
    const std::string line = content.substr(pos, end - pos);
    pos = end + 1;
    EpisodeGraph episode;
    try {
      episode = deserialize_episode(line);
    } catch (const ParseError& e) {
      // The record's own line number is always 1; report the file's.
      std::string message = e.what();
      const std::string inner = "line " + std::to_string(e.line()) + ": ";
      if (e.line() > 0 && message.rfind(inner, 0) == 0) message.erase(0, inner.size());
      throw ParseError(message + " in " + path.string(), line_no, e.field());
    } catch (const Error& e) {
      throw ParseError(std::string(e.what()) + " in " + path.string(), line_no);
    }
    if (episode.episode_id < store.next_id_) {
      throw ParseError("episode id " + std::to_string(episode.episode_id) +
                           " is not strictly increasing",
                       line_no);
    }
    store.next_id_ = episode.episode_id + 1;
    store.episodes_.push_back(std::move(episode));
  }
  return store;
}

MemoGraphStore MemoGraphStore::open(const std::filesystem::path& path) {
  MemoGraphStore store;
  if (std::filesystem::exists(path)) {
    store = load(path);
  } else {
    std::ofstream create(path, std::ios::binary | std::ios::app);
    if (!create) throw IoError("cannot create memory file " + path.string());
  }
  store.storage_path_ = path;
  return store;
}

std::vector<EpisodeGraph> MemoGraphStore::prepare(
    const std::vector<EpisodeDraft>& drafts) const {
  std::vector<EpisodeGraph> out;
  out.reserve(drafts.size());
  EpisodeId id = next_id_;
  for (const auto& d : drafts) {
    EpisodeGraph e{id++, d.graph, d.action, d.outcome, d.created_at};
    auto result = validate_episode(e);
    if (!result.ok()) throw ValidationError(std::move(result.violations));
    out.push_back(std::move(e));
  }
  return out;
}

void MemoGraphStore::append_lines(const std::vector<EpisodeGraph>& episodes) const {
  if (!storage_path_ || episodes.empty()) return;
  std::string block;
  for (const auto& e : episodes) {
    block += serialize(e);
    block += '\n';
  }
  std::ofstream out(*storage_path_, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot open memory file " + storage_path_->string());
  out.write(block.data(), static_cast<std::streamsize>(block.size()));
  out.flush();
  if (!out) throw IoError("write to " + storage_path_->string() + " failed");
}

EpisodeId MemoGraphStore::store(const EpisodeDraft& draft) {
  return store_batch({draft}).front();
}

std::vector<EpisodeId> MemoGraphStore::store_batch(
    const std::vector<EpisodeDraft>& drafts) {
  std::unique_lock lock(mutex_);
  std::vector<EpisodeGraph> prepared = prepare(drafts);
  append_lines(prepared);
  std::vector<EpisodeId> ids;
  ids.reserve(prepared.size());
  for (auto& e : prepared) {
    ids.push_back(e.episode_id);
    episodes_.push_back(std::move(e));
  }
  next_id_ += static_cast<EpisodeId>(ids.size());
  return ids;
}

std::vector<EpisodeGraph> MemoGraphStore::retrieve_all(
    const RetrieveOptions& options) const {
  std::shared_lock lock(mutex_);
  if (!options.successful_only) return episodes_;
  std::vector<EpisodeGraph> out;
  for (const auto& e : episodes_) {
    if (e.outcome.status == OutcomeStatus::kSuccess) out.push_back(e);
  }
  return out;
}

EpisodeGraph MemoGraphStore::get(EpisodeId id) const {
  std::shared_lock lock(mutex_);
  for (const auto& e : episodes_) {
    if (e.episode_id == id) return e;
  }
  throw NotFoundError("episode " + std::to_string(id) + " not found");
}

std::size_t MemoGraphStore::count() const {
  std::shared_lock lock(mutex_);
  return episodes_.size();
}

std::map<std::string, SkillStats> MemoGraphStore::stats() const {
  std::shared_lock lock(mutex_);
  std::map<std::string, SkillStats> out;
  for (const auto& e : episodes_) {
    auto& s = out[e.action.skill_id];
    ++s.episodes;
    if (e.outcome.status == OutcomeStatus::kSuccess) ++s.successes;
  }
  for (auto& [skill, s] : out) {
    s.success_rate = static_cast<double>(s.successes) / static_cast<double>(s.episodes);
  }
  return out;
}

std::size_t MemoGraphStore::persist(const std::filesystem::path& path) const {
  std::shared_lock lock(mutex_);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write memory file " + path.string());
  for (const auto& e : episodes_) {
    const std::string line = serialize(e) + '\n';
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
  return episodes_.size();
}

}  // namespace memograph
