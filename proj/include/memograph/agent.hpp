#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "memograph/embedding.hpp"
#include "memograph/matching.hpp"
#include "memograph/memostore.hpp"
#include "memograph/model_client.hpp"
#include "memograph/perceptor.hpp"
#include "memograph/skills.hpp"

namespace memograph {

enum class PlannerKind { kScripted, kRemote };
enum class EvaluatorKind { kRuleBased, kRemote };

inline constexpr double kDefaultTheta = 0.6;

struct AgentConfig {
  MatchOptions match;
  double theta = kDefaultTheta;  // acceptance threshold on s_w
  std::size_t top_k = 5;
  PlannerKind planner_kind = PlannerKind::kScripted;
  EvaluatorKind evaluator_kind = EvaluatorKind::kRuleBased;
  std::size_t max_iterations = 10;
  // Match only against episodes whose outcome was a success.
  bool successful_only = false;

  void validate() const;
};

// Agent configuration file (JSON):
//   {"weights": {"alpha", "beta", "gamma"}, "tau", "theta", "top_k",
//    "scoring_mode", "max_iterations", "successful_only"}
// Missing fields keep their defaults.
AgentConfig agent_config_from_json(const nlohmann::json& doc,
                                   AgentConfig base = {});
nlohmann::ordered_json agent_config_to_json(const AgentConfig& config);

enum class Verdict { kAct, kNoConfidentMatch };
std::string to_string(Verdict verdict);

struct ChosenAction {
  ActionRecord action;
  MatchScore score;
};

struct InferenceDecision {
  std::optional<ChosenAction> chosen;
  std::vector<MatchScore> alternatives;
  Verdict verdict = Verdict::kNoConfidentMatch;
  std::string rationale;
  std::string scene_digest;
};

nlohmann::ordered_json decision_to_json(const InferenceDecision& decision);

class PlanningError : public Error {
 public:
  using Error::Error;
};

// --- Planner --------------------------------------------------------------

// Chooses a_n from the instruction, observation, and extracted scene.
class Planner {
 public:
  virtual ~Planner() = default;
  virtual ActionRecord plan(const SceneObservation& obs, const TaskGraph& scene,
                            const SkillLibrary& library) = 0;
};

// Maps instruction phrases to fixed actions. The first rule whose phrase
// occurs in the lowercased instruction wins.
class ScriptedPlanner : public Planner {
 public:
  struct Rule {
    std::string phrase;
    ActionRecord action;
  };

  explicit ScriptedPlanner(std::vector<Rule> rules);
  ActionRecord plan(const SceneObservation& obs, const TaskGraph& scene,
                    const SkillLibrary& library) override;

 private:
  std::vector<Rule> rules_;
};

// Asks a remote model to pick a skill. Request:
//   {"prompt", "instruction", "scene", "skills", "response_schema"}
// Response: {"skill_id", "params": [{"key", "value"}], "description"}.
class RemotePlanner : public Planner {
 public:
  RemotePlanner(ModelClientConfig config, std::shared_ptr<JsonTransport> transport);
  ActionRecord plan(const SceneObservation& obs, const TaskGraph& scene,
                    const SkillLibrary& library) override;

 private:
  ModelClient client_;
};

const nlohmann::json& planner_response_schema();

// --- Outcome evaluation (learning phase) -----------------------------------

class OutcomeEvaluator {
 public:
  virtual ~OutcomeEvaluator() = default;
  virtual OutcomeRecord evaluate(const ExecutionReport& report, const TaskGraph& scene,
                                 const ActionRecord& action) = 0;
};

// success -> (success, 1.0); failure -> (failure, 0.0). Notes are copied.
class ReportOutcomeEvaluator : public OutcomeEvaluator {
 public:
  OutcomeRecord evaluate(const ExecutionReport& report, const TaskGraph& scene,
                         const ActionRecord& action) override;
};

// Human adjudication: prints the report and reads
// "<success|failure|partial> <score> [notes...]" from `in`.
class InteractiveOutcomeEvaluator : public OutcomeEvaluator {
 public:
  InteractiveOutcomeEvaluator(std::istream& in, std::ostream& out);
  OutcomeRecord evaluate(const ExecutionReport& report, const TaskGraph& scene,
                         const ActionRecord& action) override;

 private:
  std::istream& in_;
  std::ostream& out_;
};

// --- Decision evaluation (inference phase) ---------------------------------

struct EvaluationContext {
  const TaskGraph& scene;
  const std::vector<MatchScore>& ranked;  // top_k, best first
  std::span<const EpisodeGraph> memory;
  const SkillLibrary& library;
  const AgentConfig& config;
};

class DecisionEvaluator {
 public:
  virtual ~DecisionEvaluator() = default;
  virtual InferenceDecision decide(const EvaluationContext& context) = 0;
};

// Acts on the top-ranked episode iff its s_w >= theta and its action,
// after parameter remapping, is valid for the library.
class RuleBasedEvaluator : public DecisionEvaluator {
 public:
  InferenceDecision decide(const EvaluationContext& context) override;
};

// Lets a remote model select among the top_k candidates or abstain.
// Request: {"prompt", "scene", "candidates", "response_schema"}; response
// per evaluator.schema.json. A response that fails validation after
// retries falls back to the rule-based verdict with a logged warning.
class RemoteEvaluator : public DecisionEvaluator {
 public:
  RemoteEvaluator(ModelClientConfig config, std::shared_ptr<JsonTransport> transport);
  InferenceDecision decide(const EvaluationContext& context) override;

  nlohmann::json build_request(const EvaluationContext& context) const;

 private:
  ModelClient client_;
};

const nlohmann::json& evaluator_response_schema();

// Rewrites params that name nodes of the remembered scene absent from the
// current one, following the node assignment. Returns nullopt when such a
// node has no matched counterpart.
std::optional<ActionRecord> remap_action_params(const ActionRecord& action,
                                                const TaskGraph& memory_graph,
                                                const TaskGraph& scene,
                                                const MatchAssignment& node_assignment);

// --- Session log -----------------------------------------------------------

enum class Termination { kDone, kNoConfidentMatch, kIncomplete };
std::string to_string(Termination termination);

struct SessionEntry {
  std::size_t step = 0;
  std::string scene_digest;
  Verdict verdict = Verdict::kNoConfidentMatch;
  std::optional<std::string> chosen_skill;
  std::optional<double> s_w;
  std::string rationale;
  std::optional<ExecutionReport> execution;
};

struct SessionLog {
  std::vector<SessionEntry> entries;
  Termination termination = Termination::kIncomplete;

  // One JSON document per line:
  //   {"step", "scene_digest", "verdict", "chosen_skill", "s_w", "rationale",
  //    "execution"}
  std::string to_jsonl() const;
};

// Observation for a 1-based step of the inference loop.
using ObservationSource = std::function<SceneObservation(std::size_t step)>;

// --- Agent -----------------------------------------------------------------

// The learning and inference loop. One agent session is sequential.
class Agent {
 public:
  Agent(const SkillLibrary& library, Perceptor& perceptor, Encoder& encoder,
        AgentConfig config = {});

  // Extract, plan, execute, evaluate, store. Any failure leaves the store
  // untouched.
  EpisodeGraph learning_step(const SceneObservation& obs, Planner& planner,
                             ExecutionBackend& backend, OutcomeEvaluator& evaluator,
                             MemoGraphStore& store);

  // Extract, rank all of memory, and let the evaluator decide. Never
  // modifies memory.
  InferenceDecision inference_step(const SceneObservation& obs,
                                   std::span<const EpisodeGraph> memory,
                                   DecisionEvaluator& evaluator);
  InferenceDecision inference_step(const SceneObservation& obs,
                                   const MemoGraphStore& store,
                                   DecisionEvaluator& evaluator);

  // Repeats inference and execution until the backend reports the task
  // done, the evaluator abstains, or max_iterations is reached.
  SessionLog run_episode_loop(const ObservationSource& observations,
                              const MemoGraphStore& store, DecisionEvaluator& evaluator,
                              ExecutionBackend& backend);

  const AgentConfig& config() const { return config_; }
  void set_clock(std::function<std::int64_t()> clock) { clock_ = std::move(clock); }

 private:
  const SkillLibrary& library_;
  Perceptor& perceptor_;
  Encoder& encoder_;
  AgentConfig config_;
  std::function<std::int64_t()> clock_ = now_millis;
};

}  // namespace memograph
