#include "memograph/taskgraph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>

#include "memograph/errors.hpp"

namespace memograph {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

template <class Pairs>
void check_unique_keys(const Pairs& pairs, const std::string& owner,
                       const char* what, std::vector<std::string>& out) {
  std::set<std::string> seen;
  for (const auto& kv : pairs) {
    if (!seen.insert(kv.key).second) {
      out.push_back(owner + " duplicate " + what + " key " + kv.key);
    }
  }
}

// --- JSON field access with named-field errors ---------------------------

const json& require_field(const json& obj, const char* name,
                          const std::string& path) {
  auto it = obj.find(name);
  if (it == obj.end()) {
    throw SchemaError(path.empty() ? name : path + "." + name,
                      "missing required field");
  }
  return *it;
}

std::string field_path(const std::string& path, const char* name) {
  return path.empty() ? std::string(name) : path + "." + name;
}

std::string require_string(const json& obj, const char* name,
                           const std::string& path) {
  const json& v = require_field(obj, name, path);
  if (!v.is_string()) {
    throw SchemaError(field_path(path, name), "expected string");
  }
  return v.get<std::string>();
}

const json& require_array(const json& obj, const char* name,
                          const std::string& path) {
  const json& v = require_field(obj, name, path);
  if (!v.is_array()) {
    throw SchemaError(field_path(path, name), "expected array");
  }
  return v;
}

std::int64_t require_integer(const json& obj, const char* name,
                             const std::string& path) {
  const json& v = require_field(obj, name, path);
  if (!v.is_number_integer()) {
    throw SchemaError(field_path(path, name), "expected integer");
  }
  return v.get<std::int64_t>();
}

void require_object(const json& v, const std::string& path) {
  if (!v.is_object()) {
    throw SchemaError(path, "expected object");
  }
}

std::vector<KeyValue> pairs_from_json(const json& arr,
                                      const std::string& path) {
  std::vector<KeyValue> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::string p = path + "[" + std::to_string(i) + "]";
    require_object(arr[i], p);
    out.push_back({require_string(arr[i], "key", p),
                   require_string(arr[i], "value", p)});
  }
  return out;
}

ordered_json pairs_to_json(const std::vector<KeyValue>& pairs) {
  ordered_json arr = ordered_json::array();
  for (const auto& kv : pairs) {
    ordered_json item;
    item["key"] = kv.key;
    item["value"] = kv.value;
    arr.push_back(std::move(item));
  }
  return arr;
}

void graph_fields_to_json(const TaskGraph& graph, ordered_json& doc) {
  ordered_json nodes = ordered_json::array();
  for (const auto& n : graph.nodes) {
    ordered_json node;
    node["id"] = n.id;
    node["label"] = n.label;
    node["attributes"] = pairs_to_json(n.attributes);
    nodes.push_back(std::move(node));
  }
  ordered_json links = ordered_json::array();
  for (const auto& l : graph.links) {
    ordered_json link;
    link["source"] = l.source_id;
    link["target"] = l.target_id;
    link["relation"] = l.relation;
    links.push_back(std::move(link));
  }
  doc["nodes"] = std::move(nodes);
  doc["links"] = std::move(links);
  if (graph.instruction) {
    doc["instruction"] = *graph.instruction;
  }
}

}  // namespace

// ---------------------------------------------------------------------------

const NodeEntity* TaskGraph::find_node(const std::string& id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

const std::string* ActionRecord::param(const std::string& key) const {
  for (const auto& kv : params) {
    if (kv.key == key) return &kv.value;
  }
  return nullptr;
}

std::string to_string(OutcomeStatus status) {
  switch (status) {
    case OutcomeStatus::kSuccess:
      return "success";
    case OutcomeStatus::kFailure:
      return "failure";
    case OutcomeStatus::kPartial:
      return "partial";
  }
  return "unknown";
}

OutcomeStatus outcome_status_from_string(const std::string& text) {
  if (text == "success") return OutcomeStatus::kSuccess;
  if (text == "failure") return OutcomeStatus::kFailure;
  if (text == "partial") return OutcomeStatus::kPartial;
  throw ArgumentError("unknown outcome status '" + text + "'");
}

// ---------------------------------------------------------------------------

ValidationResult validate_graph(const TaskGraph& graph) {
  ValidationResult result;
  auto& out = result.violations;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const auto& n = graph.nodes[i];
    std::string name = n.id.empty() ? "node[" + std::to_string(i) + "]"
                                    : "node " + n.id;
    if (n.id.empty()) {
      out.push_back(name + " id empty");
    } else if (!ids.insert(n.id).second) {
      out.push_back("duplicate node id " + n.id);
    }
    if (n.label.empty()) out.push_back(name + " label empty");
    check_unique_keys(n.attributes, name, "attribute", out);
  }
  for (std::size_t i = 0; i < graph.links.size(); ++i) {
    const auto& l = graph.links[i];
    std::string name = "link[" + std::to_string(i) + "] " + l.source_id +
                       "->" + l.target_id;
    if (!ids.contains(l.source_id)) {
      out.push_back("link source " + l.source_id + " unresolved");
    }
    if (!ids.contains(l.target_id)) {
      out.push_back("link target " + l.target_id + " unresolved");
    }
    if (l.source_id == l.target_id) out.push_back(name + " is a self-loop");
    if (l.relation.empty()) out.push_back(name + " relation empty");
  }
  if (graph.instruction && blank(*graph.instruction)) {
    out.push_back("instruction empty");
  }
  return result;
}

ValidationResult validate_episode(const EpisodeGraph& episode) {
  ValidationResult result = validate_graph(episode.graph);
  auto& out = result.violations;
  if (episode.action.skill_id.empty()) out.push_back("action skill_id empty");
  check_unique_keys(episode.action.params, "action", "param", out);
  const double s = episode.outcome.score;
  if (!(std::isfinite(s) && s >= 0.0 && s <= 1.0)) {
    out.push_back("outcome score outside [0,1]");
  }
  return result;
}

void require_valid(const TaskGraph& graph) {
  auto result = validate_graph(graph);
  if (!result.ok()) throw ValidationError(std::move(result.violations));
}

TaskGraph canonicalize(const TaskGraph& graph) {
  require_valid(graph);
  TaskGraph out = graph;
  for (auto& n : out.nodes) {
    std::sort(n.attributes.begin(), n.attributes.end(),
              [](const KeyValue& a, const KeyValue& b) { return a.key < b.key; });
  }
  std::sort(out.nodes.begin(), out.nodes.end(),
            [](const NodeEntity& a, const NodeEntity& b) { return a.id < b.id; });
  std::sort(out.links.begin(), out.links.end(),
            [](const LinkRelation& a, const LinkRelation& b) {
              return std::tie(a.source_id, a.target_id, a.relation) <
                     std::tie(b.source_id, b.target_id, b.relation);
            });
  return out;
}

EpisodeGraph canonicalize(const EpisodeGraph& episode) {
  EpisodeGraph out = episode;
  out.graph = canonicalize(episode.graph);
  return out;
}

// ---------------------------------------------------------------------------

ordered_json graph_to_json(const TaskGraph& graph) {
  ordered_json doc = ordered_json::object();
  graph_fields_to_json(graph, doc);
  return doc;
}

ordered_json episode_to_json(const EpisodeGraph& episode) {
  ordered_json doc = ordered_json::object();
  doc["episode_id"] = episode.episode_id;
  graph_fields_to_json(episode.graph, doc);
  ordered_json action;
  action["skill_id"] = episode.action.skill_id;
  action["params"] = pairs_to_json(episode.action.params);
  action["description"] = episode.action.description;
  doc["action"] = std::move(action);
  ordered_json outcome;
  outcome["status"] = to_string(episode.outcome.status);
  outcome["score"] = episode.outcome.score;
  outcome["notes"] = episode.outcome.notes;
  doc["outcome"] = std::move(outcome);
  doc["created_at"] = episode.created_at;
  return doc;
}

TaskGraph graph_from_json(const json& doc) {
  require_object(doc, "");
  TaskGraph graph;
  const json& nodes = require_array(doc, "nodes", "");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::string p = "nodes[" + std::to_string(i) + "]";
    require_object(nodes[i], p);
    NodeEntity node;
    node.id = require_string(nodes[i], "id", p);
    node.label = require_string(nodes[i], "label", p);
    if (nodes[i].contains("attributes")) {
      node.attributes = pairs_from_json(
          require_array(nodes[i], "attributes", p), p + ".attributes");
    }
    graph.nodes.push_back(std::move(node));
  }
  const json& links = require_array(doc, "links", "");
  for (std::size_t i = 0; i < links.size(); ++i) {
    std::string p = "links[" + std::to_string(i) + "]";
    require_object(links[i], p);
    graph.links.push_back({require_string(links[i], "source", p),
                           require_string(links[i], "target", p),
                           require_string(links[i], "relation", p)});
  }
  if (doc.contains("instruction") && !doc["instruction"].is_null()) {
    graph.instruction = require_string(doc, "instruction", "");
  }
  return graph;
}

EpisodeGraph episode_from_json(const json& doc) {
  require_object(doc, "");
  EpisodeGraph episode;
  episode.episode_id = require_integer(doc, "episode_id", "");
  episode.graph = graph_from_json(doc);

  const json& action = require_field(doc, "action", "");
  require_object(action, "action");
  episode.action.skill_id = require_string(action, "skill_id", "action");
  episode.action.params =
      pairs_from_json(require_array(action, "params", "action"), "action.params");
  episode.action.description = require_string(action, "description", "action");

  const json& outcome = require_field(doc, "outcome", "");
  require_object(outcome, "outcome");
  std::string status = require_string(outcome, "status", "outcome");
  try {
    episode.outcome.status = outcome_status_from_string(status);
  } catch (const ArgumentError&) {
    throw SchemaError("outcome.status", "unknown status '" + status + "'");
  }
  const json& score = require_field(outcome, "score", "outcome");
  if (!score.is_number()) throw SchemaError("outcome.score", "expected number");
  episode.outcome.score = score.get<double>();
  episode.outcome.notes = require_string(outcome, "notes", "outcome");

  episode.created_at = require_integer(doc, "created_at", "");
  return episode;
}

std::string serialize(const TaskGraph& graph) {
  return graph_to_json(graph).dump();
}

std::string serialize(const EpisodeGraph& episode) {
  return episode_to_json(episode).dump();
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t offset = std::min<std::size_t>(e.byte, text.size());
    std::size_t line =
        1 + static_cast<std::size_t>(std::count(
                text.begin(), text.begin() + static_cast<long>(offset > 0 ? offset - 1 : 0),
                '\n'));
    throw ParseError(e.what(), line);
  }
}

TaskGraph deserialize_graph(const std::string& text) {
  TaskGraph graph = graph_from_json(parse_json_text(text));
  require_valid(graph);
  return graph;
}

EpisodeGraph deserialize_episode(const std::string& text) {
  EpisodeGraph episode = episode_from_json(parse_json_text(text));
  auto result = validate_episode(episode);
  if (!result.ok()) throw ValidationError(std::move(result.violations));
  return episode;
}

std::string graph_digest(const TaskGraph& graph) {
  const std::string bytes = serialize(canonicalize(graph));
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace memograph
