#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace memograph {

// Ordered key/value text pair. Used for node attributes and action params.
struct KeyValue {
  std::string key;
  std::string value;

  friend bool operator==(const KeyValue&, const KeyValue&) = default;
};

// An object or agent in a scene. Two nodes may share a label (two chairs)
// but never an id.
struct NodeEntity {
  std::string id;
  std::string label;
  std::vector<KeyValue> attributes;

  friend bool operator==(const NodeEntity&, const NodeEntity&) = default;
};

// Directed relation: reads "source relation target", e.g. "cup on top of
// table".
struct LinkRelation {
  std::string source_id;
  std::string target_id;
  std::string relation;

  friend bool operator==(const LinkRelation&, const LinkRelation&) = default;
};

struct TaskGraph {
  std::vector<NodeEntity> nodes;
  std::vector<LinkRelation> links;
  std::optional<std::string> instruction;

  const NodeEntity* find_node(const std::string& id) const;

  friend bool operator==(const TaskGraph&, const TaskGraph&) = default;
};

struct ActionRecord {
  std::string skill_id;
  std::vector<KeyValue> params;
  std::string description;

  const std::string* param(const std::string& key) const;

  friend bool operator==(const ActionRecord&, const ActionRecord&) = default;
};

enum class OutcomeStatus { kSuccess, kFailure, kPartial };

std::string to_string(OutcomeStatus status);
OutcomeStatus outcome_status_from_string(const std::string& text);

struct OutcomeRecord {
  OutcomeStatus status = OutcomeStatus::kSuccess;
  double score = 0.0;
  std::string notes;

  friend bool operator==(const OutcomeRecord&, const OutcomeRecord&) = default;
};

using EpisodeId = std::int64_t;

// One MemoGraph record: the scene as extracted, what was done, and how it
// went.
struct EpisodeGraph {
  EpisodeId episode_id = 0;
  TaskGraph graph;
  ActionRecord action;
  OutcomeRecord outcome;
  std::int64_t created_at = 0;  // milliseconds since the Unix epoch, UTC

  friend bool operator==(const EpisodeGraph&, const EpisodeGraph&) = default;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationResult {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  explicit operator bool() const { return ok(); }
};

// Checks every TaskGraph invariant. Violations are returned, never thrown.
ValidationResult validate_graph(const TaskGraph& graph);

// Graph invariants plus the action/outcome invariants of an episode.
ValidationResult validate_episode(const EpisodeGraph& episode);

// Throws ValidationError if `graph` is invalid.
void require_valid(const TaskGraph& graph);

// ---------------------------------------------------------------------------
// Canonical form
// ---------------------------------------------------------------------------

// Nodes by id, links by (source, target, relation), attributes by key.
// Throws ValidationError on an invalid graph.
TaskGraph canonicalize(const TaskGraph& graph);

// Canonicalizes the episode's graph; action params keep caller order.
EpisodeGraph canonicalize(const EpisodeGraph& episode);

// ---------------------------------------------------------------------------
// Documents
//
// Field order in the emitted JSON is fixed, so a canonical value always
// serializes to the same bytes. Output is compact (a single line), which is
// what the line-delimited store relies on.
// ---------------------------------------------------------------------------

nlohmann::ordered_json graph_to_json(const TaskGraph& graph);
nlohmann::ordered_json episode_to_json(const EpisodeGraph& episode);

// Schema checks only; raise SchemaError naming the field. Do not validate
// graph invariants.
TaskGraph graph_from_json(const nlohmann::json& doc);
EpisodeGraph episode_from_json(const nlohmann::json& doc);

std::string serialize(const TaskGraph& graph);
std::string serialize(const EpisodeGraph& episode);

// Parse, schema-check, then validate. Raise ParseError (with line) on
// malformed text, SchemaError on a missing or mistyped field, and
// ValidationError when the graph breaks an invariant.
TaskGraph deserialize_graph(const std::string& text);
EpisodeGraph deserialize_episode(const std::string& text);

// Parses `text` as JSON, converting parser failures to ParseError with a
// 1-based line number.
nlohmann::json parse_json_text(const std::string& text);

// Stable 64-bit FNV-1a digest of the canonical serialization, as 16 hex
// characters.
std::string graph_digest(const TaskGraph& graph);

}  // namespace memograph
