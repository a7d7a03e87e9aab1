#include "memograph/agent.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "assets.hpp"
#include "memograph/json_schema.hpp"
#include "memograph/log.hpp"

namespace memograph {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string lowercase(std::string text) {
  for (auto& c : text) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return text;
}

std::string format_score(double value) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  out << value;
  return out.str();
}

template <class T>
T read_field(const json& doc, const char* key, T fallback) {
  auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw SchemaError(key, "wrong type");
  }
}

void throw_first_violation(const std::vector<SchemaViolation>& violations) {
  if (!violations.empty()) {
    throw SchemaError(violations.front().path, violations.front().message);
  }
}

const EpisodeGraph* find_episode(std::span<const EpisodeGraph> memory, EpisodeId id) {
  for (const auto& e : memory) {
    if (e.episode_id == id) return &e;
  }
  return nullptr;
}

InferenceDecision abstain(const EvaluationContext& ctx, std::string rationale) {
  InferenceDecision d;
  d.alternatives = ctx.ranked;
  d.verdict = Verdict::kNoConfidentMatch;
  d.rationale = std::move(rationale);
  return d;
}

// Builds an act decision for `score`, or an abstention explaining why the
// remembered action cannot be reused here.
InferenceDecision act_on(const EvaluationContext& ctx, const MatchScore& score,
                         std::string rationale) {
  const EpisodeGraph* episode = find_episode(ctx.memory, score.memory_episode_id);
  if (episode == nullptr) {
    return abstain(ctx, "episode " + std::to_string(score.memory_episode_id) +
                            " missing from memory");
  }
  auto remapped = remap_action_params(episode->action, episode->graph, ctx.scene,
                                      score.node_assignment);
  if (!remapped) {
    return abstain(ctx, "episode " + std::to_string(score.memory_episode_id) +
                            ": action refers to objects with no counterpart in the scene");
  }
  if (!ctx.library.contains(remapped->skill_id)) {
    return abstain(ctx, "skill '" + remapped->skill_id + "' not in library");
  }
  const auto check = ctx.library.validate_params(remapped->skill_id, remapped->params);
  if (!check.ok()) {
    return abstain(ctx, "remembered action invalid: " + check.violations.front());
  }
  InferenceDecision d;
  d.chosen = ChosenAction{std::move(*remapped), score};
  d.alternatives = ctx.ranked;
  d.verdict = Verdict::kAct;
  d.rationale = std::move(rationale);
  return d;
}

ordered_json score_summary(const MatchScore& s) {
  ordered_json out;
  out["episode_id"] = s.memory_episode_id;
  out["s_n"] = s.s_n;
  out["s_l"] = s.s_l;
  out["s_i"] = s.s_i;
  out["s_w"] = s.s_w;
  return out;
}

ordered_json action_json(const ActionRecord& action) {
  ordered_json out;
  out["skill_id"] = action.skill_id;
  ordered_json params = ordered_json::array();
  for (const auto& kv : action.params) params.push_back({{"key", kv.key}, {"value", kv.value}});
  out["params"] = std::move(params);
  out["description"] = action.description;
  return out;
}

ordered_json report_json(const ExecutionReport& report) {
  ordered_json out;
  out["status"] = to_string(report.status);
  out["done"] = report.task_done;
  out["duration_ms"] = report.duration_ms;
  out["notes"] = report.notes;
  return out;
}

ActionRecord action_from_response(const json& doc) {
  ActionRecord action;
  action.skill_id = doc.at("skill_id").get<std::string>();
  for (const auto& p : doc.at("params")) {
    action.params.push_back({p.at("key").get<std::string>(), p.at("value").get<std::string>()});
  }
  action.description = doc.at("description").get<std::string>();
  return action;
}

const char* kPlannerPrompt =
    "You control a service robot with a fixed set of skills. Given the user's "
    "instruction and the scene graph, choose exactly one skill and its "
    "parameters. Parameter values that refer to objects must use node ids from "
    "the scene. Reply with JSON matching the response schema.";

const char* kEvaluatorPrompt =
    "A service robot compares the current scene graph with remembered "
    "episodes. Each candidate lists its similarity scores and the action that "
    "was taken then. Select the candidate whose action fits the current scene, "
    "or abstain if none does. Reply with JSON matching the response schema.";

}  // namespace

// --- Configuration ----------------------------------------------------------

void AgentConfig::validate() const {
  match.validate();
  if (!(theta >= 0.0 && theta <= 1.0)) throw ArgumentError("theta must lie in [0, 1]");
  if (top_k == 0) throw ArgumentError("top_k must be positive");
  if (max_iterations == 0) throw ArgumentError("max_iterations must be positive");
}

AgentConfig agent_config_from_json(const json& doc, AgentConfig base) {
  if (!doc.is_object()) throw SchemaError("", "agent config must be an object");
  AgentConfig c = std::move(base);
  if (auto it = doc.find("weights"); it != doc.end()) {
    if (!it->is_object()) throw SchemaError("weights", "expected object");
    c.match.weights.alpha = read_field(*it, "alpha", c.match.weights.alpha);
    c.match.weights.beta = read_field(*it, "beta", c.match.weights.beta);
    c.match.weights.gamma = read_field(*it, "gamma", c.match.weights.gamma);
  }
  c.match.tau = read_field(doc, "tau", c.match.tau);
  c.theta = read_field(doc, "theta", c.theta);
  c.top_k = read_field(doc, "top_k", c.top_k);
  if (auto it = doc.find("scoring_mode"); it != doc.end()) {
    if (!it->is_string()) throw SchemaError("scoring_mode", "expected string");
    c.match.mode = scoring_mode_from_string(it->get<std::string>());
  }
  c.max_iterations = read_field(doc, "max_iterations", c.max_iterations);
  c.successful_only = read_field(doc, "successful_only", c.successful_only);
  c.validate();
  return c;
}

ordered_json agent_config_to_json(const AgentConfig& c) {
  ordered_json out;
  out["weights"] = {{"alpha", c.match.weights.alpha},
                    {"beta", c.match.weights.beta},
                    {"gamma", c.match.weights.gamma}};
  out["tau"] = c.match.tau;
  out["theta"] = c.theta;
  out["top_k"] = c.top_k;
  out["scoring_mode"] = to_string(c.match.mode);
  out["max_iterations"] = c.max_iterations;
  out["successful_only"] = c.successful_only;
  return out;
}

std::string to_string(Verdict verdict) {
  return verdict == Verdict::kAct ? "act" : "no_confident_match";
}

ordered_json decision_to_json(const InferenceDecision& d) {
  ordered_json out;
  out["verdict"] = to_string(d.verdict);
  out["scene_digest"] = d.scene_digest;
  if (d.chosen) {
    ordered_json chosen = action_json(d.chosen->action);
    chosen["match"] = score_summary(d.chosen->score);
    out["chosen"] = std::move(chosen);
  } else {
    out["chosen"] = nullptr;
  }
  ordered_json alts = ordered_json::array();
  for (const auto& s : d.alternatives) alts.push_back(score_summary(s));
  out["alternatives"] = std::move(alts);
  out["rationale"] = d.rationale;
  return out;
}

// --- Planners ---------------------------------------------------------------

ScriptedPlanner::ScriptedPlanner(std::vector<Rule> rules) : rules_(std::move(rules)) {
  for (auto& r : rules_) r.phrase = lowercase(r.phrase);
}

ActionRecord ScriptedPlanner::plan(const SceneObservation& obs, const TaskGraph&,
                                   const SkillLibrary&) {
  if (!obs.instruction) throw PlanningError("scripted planner needs an instruction");
  const std::string text = lowercase(*obs.instruction);
  for (const auto& r : rules_) {
    if (text.find(r.phrase) != std::string::npos) return r.action;
  }
  throw PlanningError("no scripted rule matches instruction \"" + *obs.instruction + "\"");
}

const json& planner_response_schema() {
  static const json schema = json::parse(assets::kPlannerSchema);
  return schema;
}

RemotePlanner::RemotePlanner(ModelClientConfig config,
                             std::shared_ptr<JsonTransport> transport)
    : client_(std::move(config), std::move(transport)) {}

ActionRecord RemotePlanner::plan(const SceneObservation& obs, const TaskGraph& scene,
                                 const SkillLibrary& library) {
  json payload;
  payload["prompt"] = kPlannerPrompt;
  payload["instruction"] = obs.instruction ? json(*obs.instruction) : json(nullptr);
  payload["scene"] = graph_to_json(canonicalize(scene));
  payload["skills"] = library_to_json(library);
  payload["response_schema"] = planner_response_schema();
  try {
    return client_.request<ActionRecord>(payload, [&library](const std::string& raw) {
      const json doc = parse_json_text(raw);
      throw_first_violation(check_schema(doc, planner_response_schema()));
      ActionRecord action = action_from_response(doc);
      if (!library.contains(action.skill_id)) {
        throw ValidationError({"skill " + action.skill_id + " not in library"});
      }
      auto check = library.validate_params(action.skill_id, action.params);
      if (!check.ok()) throw ValidationError(std::move(check.violations));
      return action;
    });
  } catch (const TransportError&) {
    throw;
  } catch (const Error& e) {
    throw PlanningError(std::string("planner response rejected: ") + e.what());
  }
}

// --- Outcome evaluators -----------------------------------------------------

OutcomeRecord ReportOutcomeEvaluator::evaluate(const ExecutionReport& report,
                                               const TaskGraph&, const ActionRecord&) {
  OutcomeRecord out;
  const bool ok = report.status == ExecutionStatus::kSuccess;
  out.status = ok ? OutcomeStatus::kSuccess : OutcomeStatus::kFailure;
  out.score = ok ? 1.0 : 0.0;
  out.notes = report.notes;
  return out;
}

InteractiveOutcomeEvaluator::InteractiveOutcomeEvaluator(std::istream& in,
                                                         std::ostream& out)
    : in_(in), out_(out) {}

OutcomeRecord InteractiveOutcomeEvaluator::evaluate(const ExecutionReport& report,
                                                    const TaskGraph&,
                                                    const ActionRecord& action) {
  out_ << "executed " << action.skill_id << ": " << to_string(report.status)
       << (report.notes.empty() ? "" : " (" + report.notes + ")") << "\n"
       << "outcome [success|failure|partial] score [notes]: " << std::flush;
  std::string line;
  if (!std::getline(in_, line)) throw ArgumentError("no outcome entered");
  std::istringstream fields(line);
  std::string status;
  double score = 0.0;
  if (!(fields >> status >> score)) {
    throw ArgumentError("expected '<status> <score> [notes]', got '" + line + "'");
  }
  OutcomeRecord out;
  try {
    out.status = outcome_status_from_string(status);
  } catch (const Error& e) {
    throw ArgumentError(e.what());
  }
  if (!(score >= 0.0 && score <= 1.0)) throw ArgumentError("score must lie in [0, 1]");
  out.score = score;
  std::getline(fields >> std::ws, out.notes);
  return out;
}

// --- Decision evaluators ----------------------------------------------------

std::optional<ActionRecord> remap_action_params(const ActionRecord& action,
                                                const TaskGraph& memory_graph,
                                                const TaskGraph& scene,
                                                const MatchAssignment& node_assignment) {
  const TaskGraph memory = canonicalize(memory_graph);
  const TaskGraph query = canonicalize(scene);
  ActionRecord out = action;
  for (auto& kv : out.params) {
    if (query.find_node(kv.value) != nullptr) continue;
    auto it = std::find_if(memory.nodes.begin(), memory.nodes.end(),
                           [&](const NodeEntity& n) { return n.id == kv.value; });
    if (it == memory.nodes.end()) continue;  // not an object reference
    const auto col = static_cast<std::size_t>(it - memory.nodes.begin());
    auto pair = std::find_if(node_assignment.pairs.begin(), node_assignment.pairs.end(),
                             [col](const MatchedPair& p) { return p.col == col; });
    if (pair == node_assignment.pairs.end() || pair->row >= query.nodes.size()) {
      return std::nullopt;
    }
    kv.value = query.nodes[pair->row].id;
  }
  return out;
}

InferenceDecision RuleBasedEvaluator::decide(const EvaluationContext& ctx) {
  if (ctx.ranked.empty()) return abstain(ctx, "memory is empty");
  const MatchScore& top = ctx.ranked.front();
  const std::string summary = "episode " + std::to_string(top.memory_episode_id) +
                              " scored s_w=" + format_score(top.s_w);
  if (top.s_w < ctx.config.theta) {
    return abstain(ctx, summary + " below theta=" + format_score(ctx.config.theta));
  }
  return act_on(ctx, top, summary + " >= theta=" + format_score(ctx.config.theta));
}

const json& evaluator_response_schema() {
  static const json schema = json::parse(assets::kEvaluatorSchema);
  return schema;
}

RemoteEvaluator::RemoteEvaluator(ModelClientConfig config,
                                 std::shared_ptr<JsonTransport> transport)
    : client_(std::move(config), std::move(transport)) {}

json RemoteEvaluator::build_request(const EvaluationContext& ctx) const {
  json payload;
  payload["prompt"] = kEvaluatorPrompt;
  payload["scene"] = graph_to_json(canonicalize(ctx.scene));
  json candidates = json::array();
  for (const auto& s : ctx.ranked) {
    json c = score_summary(s);
    if (const EpisodeGraph* e = find_episode(ctx.memory, s.memory_episode_id)) {
      c["action"] = action_json(e->action);
      c["outcome"] = to_string(e->outcome.status);
      c["scene"] = graph_to_json(e->graph);
    }
    candidates.push_back(std::move(c));
  }
  payload["candidates"] = std::move(candidates);
  payload["theta"] = ctx.config.theta;
  payload["response_schema"] = evaluator_response_schema();
  return payload;
}

InferenceDecision RemoteEvaluator::decide(const EvaluationContext& ctx) {
  if (ctx.ranked.empty()) return abstain(ctx, "memory is empty");
  struct Reply {
    std::optional<EpisodeId> selected;
    std::string rationale;
  };
  Reply reply;
  try {
    reply = client_.request<Reply>(build_request(ctx), [&ctx](const std::string& raw) {
      const json doc = parse_json_text(raw);
      throw_first_violation(check_schema(doc, evaluator_response_schema()));
      Reply r;
      r.rationale = doc["rationale"].get<std::string>();
      if (doc["decision"] == "select") {
        if (doc["episode_id"].is_null()) {
          throw SchemaError("episode_id", "select requires an episode id");
        }
        const auto id = doc["episode_id"].get<EpisodeId>();
        const bool known = std::any_of(ctx.ranked.begin(), ctx.ranked.end(),
                                       [id](const MatchScore& s) {
                                         return s.memory_episode_id == id;
                                       });
        if (!known) throw SchemaError("episode_id", "not among the candidates");
        r.selected = id;
      }
      return r;
    });
  } catch (const TransportError&) {
    throw;
  } catch (const Error& e) {
    log_warning(std::string("remote evaluator response rejected, using rule-based "
                            "verdict: ") + e.what());
    InferenceDecision d = RuleBasedEvaluator().decide(ctx);
    d.rationale = "fallback: " + d.rationale;
    return d;
  }
  if (!reply.selected) return abstain(ctx, reply.rationale);
  const auto it = std::find_if(ctx.ranked.begin(), ctx.ranked.end(),
                               [&](const MatchScore& s) {
                                 return s.memory_episode_id == *reply.selected;
                               });
  return act_on(ctx, *it, reply.rationale);
}

// --- Session log ------------------------------------------------------------

std::string to_string(Termination termination) {
  switch (termination) {
    case Termination::kDone:
      return "done";
    case Termination::kNoConfidentMatch:
      return "no_confident_match";
    case Termination::kIncomplete:
      return "incomplete";
  }
  return "incomplete";
}

std::string SessionLog::to_jsonl() const {
  std::string out;
  for (const auto& e : entries) {
    ordered_json line;
    line["step"] = e.step;
    line["scene_digest"] = e.scene_digest;
    line["verdict"] = to_string(e.verdict);
    line["chosen_skill"] = e.chosen_skill ? ordered_json(*e.chosen_skill) : ordered_json(nullptr);
    line["s_w"] = e.s_w ? ordered_json(*e.s_w) : ordered_json(nullptr);
    line["rationale"] = e.rationale;
    line["execution"] = e.execution ? report_json(*e.execution) : ordered_json(nullptr);
    out += line.dump();
    out += '\n';
  }
  return out;
}

// --- Agent ------------------------------------------------------------------

Agent::Agent(const SkillLibrary& library, Perceptor& perceptor, Encoder& encoder,
             AgentConfig config)
    : library_(library), perceptor_(perceptor), encoder_(encoder), config_(std::move(config)) {
  config_.validate();
}

EpisodeGraph Agent::learning_step(const SceneObservation& obs, Planner& planner,
                                  ExecutionBackend& backend, OutcomeEvaluator& evaluator,
                                  MemoGraphStore& store) {
  if (obs.mode() != PerceptionMode::kInstruction) {
    throw ArgumentError("learning needs an instructed observation");
  }
  const TaskGraph scene = perceptor_.extract_scene_graph(obs);
  ActionRecord action = planner.plan(obs, scene, library_);
  if (!library_.contains(action.skill_id)) {
    throw PlanningError("planned skill '" + action.skill_id + "' not in library");
  }
  auto check = library_.validate_params(action.skill_id, action.params);
  if (!check.ok()) {
    throw PlanningError("planned params invalid: " + check.violations.front());
  }
  const ExecutionReport report =
      backend.execute(library_.lookup(action.skill_id), action.params, obs.scenario_tag);
  OutcomeRecord outcome = evaluator.evaluate(report, scene, action);
  const EpisodeId id = store.store({scene, std::move(action), std::move(outcome), clock_()});
  return store.get(id);
}

InferenceDecision Agent::inference_step(const SceneObservation& obs,
                                        std::span<const EpisodeGraph> memory,
                                        DecisionEvaluator& evaluator) {
  const TaskGraph scene = perceptor_.extract_scene_graph(obs);
  std::vector<EpisodeGraph> filtered;
  if (config_.successful_only) {
    for (const auto& e : memory) {
      if (e.outcome.status == OutcomeStatus::kSuccess) filtered.push_back(e);
    }
    memory = filtered;
  }
  const std::vector<MatchScore> ranked =
      rank_memory(scene, memory, config_.match, config_.top_k, encoder_);
  const EvaluationContext ctx{scene, ranked, memory, library_, config_};
  InferenceDecision decision = evaluator.decide(ctx);
  decision.scene_digest = graph_digest(scene);
  return decision;
}

InferenceDecision Agent::inference_step(const SceneObservation& obs,
                                        const MemoGraphStore& store,
                                        DecisionEvaluator& evaluator) {
  const std::vector<EpisodeGraph> snapshot =
      store.retrieve_all({.successful_only = config_.successful_only});
  return inference_step(obs, std::span<const EpisodeGraph>(snapshot), evaluator);
}

SessionLog Agent::run_episode_loop(const ObservationSource& observations,
                                   const MemoGraphStore& store,
                                   DecisionEvaluator& evaluator,
                                   ExecutionBackend& backend) {
  const std::vector<EpisodeGraph> snapshot =
      store.retrieve_all({.successful_only = config_.successful_only});
  SessionLog log;
  for (std::size_t step = 1; step <= config_.max_iterations; ++step) {
    const SceneObservation obs = observations(step);
    InferenceDecision d = inference_step(obs, snapshot, evaluator);
    SessionEntry entry;
    entry.step = step;
    entry.scene_digest = d.scene_digest;
    entry.verdict = d.verdict;
    entry.rationale = d.rationale;
    if (d.verdict == Verdict::kNoConfidentMatch || !d.chosen) {
      if (!d.alternatives.empty()) entry.s_w = d.alternatives.front().s_w;
      log.entries.push_back(std::move(entry));
      log.termination = Termination::kNoConfidentMatch;
      return log;
    }
    entry.chosen_skill = d.chosen->action.skill_id;
    entry.s_w = d.chosen->score.s_w;
    entry.execution = backend.execute(library_.lookup(d.chosen->action.skill_id),
                                      d.chosen->action.params, obs.scenario_tag);
    const bool done = entry.execution->task_done;
    log.entries.push_back(std::move(entry));
    if (done) {
      log.termination = Termination::kDone;
      return log;
    }
  }
  log.termination = Termination::kIncomplete;
  return log;
}

}  // namespace memograph
