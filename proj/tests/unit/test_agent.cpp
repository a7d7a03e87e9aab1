#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "fixtures.hpp"
#include "generators.hpp"
#include "memograph/agent.hpp"
#include "temp_dir.hpp"

using namespace memograph;
using memograph::testing::fixture_path;
using memograph::testing::read_fixture;
using memograph::testing::ReplayTransport;

namespace {

ActionRecord take_cup() { return {"receive_object", {{"object", "cup"}}, "take it"}; }
ActionRecord refill_mug() {
  return {"refill_tea", {{"target", "mug"}, {"source", "pot"}}, "pour"};
}

SceneObservation scene_obs(const std::string& file, std::optional<std::string> instruction,
                           std::string tag = {}) {
  return {std::move(instruction), SceneFileSource{fixture_path(file)}, std::move(tag)};
}

std::shared_ptr<SimulationBackend> sim() {
  return SimulationBackend::from_json(nlohmann::json::parse(read_fixture("sim_fixtures.json")));
}

ModelClientConfig remote_client() {
  ModelClientConfig c;
  c.endpoint = "http://vlm.invalid/v1";
  c.retry = memograph::testing::no_sleep_retry();
  return c;
}

class ThrowingEvaluator : public OutcomeEvaluator {
 public:
  OutcomeRecord evaluate(const ExecutionReport&, const TaskGraph&, const ActionRecord&) override {
    throw ArgumentError("operator walked away");
  }
};

class ThrowingEncoder : public Encoder {
 public:
  std::size_t dimension() const override { return 8; }
  EmbeddingVector encode(const std::string&) override { throw TransportError("down"); }
};

// Counts calls and hands back a fixed verdict.
class FixedEvaluator : public DecisionEvaluator {
 public:
  InferenceDecision decide(const EvaluationContext& ctx) override {
    ++calls;
    return RuleBasedEvaluator().decide(ctx);
  }
  int calls = 0;
};

struct Rig {
  SkillLibrary library = default_skill_library();
  MockPerceptor perceptor;
  DeterministicEncoder encoder;
  std::int64_t tick = 1000;
  Agent agent;

  explicit Rig(AgentConfig config = {}) : agent(library, perceptor, encoder, config) {
    agent.set_clock([this] { return tick++; });
  }
};

}  // namespace

TEST_SUITE("agent") {
  TEST_CASE("config validation and JSON") {
    AgentConfig c;
    c.validate();
    c.theta = 1.5;
    CHECK_THROWS_AS(c.validate(), ArgumentError);
    c.theta = 0.6;
    c.top_k = 0;
    CHECK_THROWS_AS(c.validate(), ArgumentError);

    const auto doc = nlohmann::json::parse(
        R"({"weights":{"alpha":0.5,"beta":0.25,"gamma":0.25},"tau":0.3,"theta":0.8,
            "top_k":3,"scoring_mode":"matched_over_max","max_iterations":4})");
    const AgentConfig read = agent_config_from_json(doc);
    CHECK(read.match.weights.alpha == 0.5);
    CHECK(read.match.tau == 0.3);
    CHECK(read.theta == 0.8);
    CHECK(read.top_k == 3);
    CHECK(read.max_iterations == 4);
    const AgentConfig again = agent_config_from_json(agent_config_to_json(read));
    CHECK(agent_config_to_json(again) == agent_config_to_json(read));
    CHECK(agent_config_from_json(nlohmann::json::object()).theta == kDefaultTheta);
    CHECK_THROWS(agent_config_from_json(nlohmann::json::parse(R"({"theta":-1})")));
  }

  TEST_CASE("learning step stores a successful episode") {
    Rig rig;
    MemoGraphStore store;
    ScriptedPlanner planner({{"take the cup", take_cup()}});
    ReportOutcomeEvaluator evaluator;
    auto backend = sim();
    const EpisodeGraph e = rig.agent.learning_step(scene_obs("scene_take_cup.json", "Take the cup"),
                                                   planner, *backend, evaluator, store);
    CHECK(e.episode_id == 1);
    CHECK(e.action == take_cup());
    CHECK(e.outcome.status == OutcomeStatus::kSuccess);
    CHECK(e.outcome.score == 1.0);
    CHECK(e.created_at == 1000);
    REQUIRE(e.graph.instruction);
    CHECK(*e.graph.instruction == "Take the cup");
    CHECK(store.count() == 1);
  }

  TEST_CASE("failed executions are stored as failures") {
    Rig rig;
    MemoGraphStore store;
    ScriptedPlanner planner({{"refill", refill_mug()}});
    ReportOutcomeEvaluator evaluator;
    auto backend = sim();
    const EpisodeGraph e = rig.agent.learning_step(
        scene_obs("scene_tea.json", "please refill my teacup", "spill"), planner, *backend,
        evaluator, store);
    CHECK(e.outcome.status == OutcomeStatus::kFailure);
    CHECK(e.outcome.score == 0.0);
    CHECK(e.outcome.notes == "tea spilled");
  }

  TEST_CASE("no partial writes at any failing stage") {
    Rig rig;
    memograph::testing::TempDir dir;
    const auto mem = dir.path() / "sub" / "memory.jsonl";
    std::filesystem::create_directories(mem.parent_path());
    MemoGraphStore store = MemoGraphStore::open(mem);
    ScriptedPlanner planner({{"take the cup", take_cup()}, {"refill", refill_mug()},
                             {"juggle", {"juggle", {}, ""}},
                             {"grab", {"receive_object", {{"hand", "left"}}, ""}},
                             {"lift", {"lift_desk_assist", {{"target", "desk"}}, ""}}});
    ReportOutcomeEvaluator report;
    ThrowingEvaluator throwing;
    auto backend = sim();

    SUBCASE("perception") {
      CHECK_THROWS_AS(rig.agent.learning_step(scene_obs("scene_bad.json", "take the cup"),
                                              planner, *backend, report, store),
                      ValidationError);
    }
    SUBCASE("intuitive observation") {
      CHECK_THROWS_AS(rig.agent.learning_step(scene_obs("scene_take_cup.json", std::nullopt),
                                              planner, *backend, report, store),
                      ArgumentError);
    }
    SUBCASE("planner has no rule") {
      CHECK_THROWS_AS(rig.agent.learning_step(scene_obs("scene_take_cup.json", "dance"),
                                              planner, *backend, report, store),
                      PlanningError);
    }
    SUBCASE("planner picks a skill outside the library") {
      CHECK_THROWS_AS(rig.agent.learning_step(scene_obs("scene_take_cup.json", "juggle"),
                                              planner, *backend, report, store),
                      PlanningError);
    }
    SUBCASE("planner params invalid") {
      CHECK_THROWS_AS(rig.agent.learning_step(scene_obs("scene_take_cup.json", "grab it"),
                                              planner, *backend, report, store),
                      PlanningError);
    }
    SUBCASE("execution") {
      CHECK_THROWS_AS(rig.agent.learning_step(scene_obs("scene_take_cup.json", "lift this"),
                                              planner, *backend, report, store),
                      FixtureMissingError);
    }
    SUBCASE("evaluation") {
      CHECK_THROWS_AS(rig.agent.learning_step(scene_obs("scene_take_cup.json", "take the cup"),
                                              planner, *backend, throwing, store),
                      ArgumentError);
    }
    SUBCASE("storage") {
      std::filesystem::remove_all(mem.parent_path());
      CHECK_THROWS_AS(rig.agent.learning_step(scene_obs("scene_take_cup.json", "take the cup"),
                                              planner, *backend, report, store),
                      IoError);
    }
    CHECK(store.count() == 0);
  }

  TEST_CASE("identity retrieval acts with score 1 even at theta 1") {
    AgentConfig c;
    c.theta = 1.0;
    Rig rig(c);
    MemoGraphStore store;
    ScriptedPlanner planner({{"take the cup", take_cup()}});
    ReportOutcomeEvaluator report;
    rig.agent.learning_step(scene_obs("scene_take_cup.json", "take the cup"), planner, *sim(),
                            report, store);
    RuleBasedEvaluator evaluator;
    const auto d =
        rig.agent.inference_step(scene_obs("scene_take_cup.json", "take the cup"), store, evaluator);
    REQUIRE(d.verdict == Verdict::kAct);
    REQUIRE(d.chosen);
    CHECK(d.chosen->action == take_cup());
    CHECK(d.chosen->score.s_w == 1.0);
    CHECK(d.scene_digest == graph_digest(load_scene_file(fixture_path("scene_take_cup.json"))));
  }

  TEST_CASE("empty memory abstains") {
    Rig rig;
    MemoGraphStore store;
    RuleBasedEvaluator evaluator;
    const auto d =
        rig.agent.inference_step(scene_obs("scene_take_cup.json", "take the cup"), store, evaluator);
    CHECK(d.verdict == Verdict::kNoConfidentMatch);
    CHECK_FALSE(d.chosen);
    CHECK(d.rationale == "memory is empty");
  }

  TEST_CASE("top score below theta abstains and keeps alternatives") {
    const SkillLibrary library = default_skill_library();
    const AgentConfig config;
    const TaskGraph scene = load_scene_file(fixture_path("scene_take_cup.json"));
    const std::vector<EpisodeGraph> memory{{7, scene, take_cup(), {}, 0}};
    MatchScore top;
    top.s_w = 0.41;
    top.memory_episode_id = 7;
    MatchScore second = top;
    second.s_w = 0.2;
    const std::vector<MatchScore> ranked{top, second};
    const auto d = RuleBasedEvaluator().decide({scene, ranked, memory, library, config});
    CHECK(d.verdict == Verdict::kNoConfidentMatch);
    CHECK(d.alternatives.size() == 2);
    CHECK(d.rationale == "episode 7 scored s_w=0.4100 below theta=0.6000");
  }

  TEST_CASE("decision document") {
    Rig rig;
    MemoGraphStore store;
    ScriptedPlanner planner({{"take the cup", take_cup()}});
    ReportOutcomeEvaluator report;
    rig.agent.learning_step(scene_obs("scene_take_cup.json", "take the cup"), planner, *sim(),
                            report, store);
    RuleBasedEvaluator evaluator;
    const auto d =
        rig.agent.inference_step(scene_obs("scene_take_cup.json", "take the cup"), store, evaluator);
    const auto doc = decision_to_json(d);
    CHECK(doc["verdict"] == "act");
    CHECK(doc["chosen"]["skill_id"] == "receive_object");
    CHECK(doc["chosen"]["match"]["episode_id"] == 1);
    CHECK(doc["alternatives"].size() == 1);
    const auto none = decision_to_json(InferenceDecision{});
    CHECK(none["verdict"] == "no_confident_match");
    CHECK(none["chosen"].is_null());
  }

  TEST_CASE("raising theta never turns abstain into act") {
    Rng rng(99);
    const SkillLibrary library = default_skill_library();
    MockPerceptor perceptor;
    DeterministicEncoder encoder;
    for (int round = 0; round < 20; ++round) {
      std::vector<EpisodeGraph> memory;
      for (EpisodeId id = 1; id <= 6; ++id) {
        TaskGraph g = memograph::testing::random_graph(rng, {6, 8, true});
        memory.push_back({id, g, {"refill_tea", {{"target", g.nodes.front().id}}, ""}, {}, 0});
      }
      const TaskGraph query = perturb_changed(memory[rng.below(memory.size())].graph, "",
                                              PerturbationSpec{0.4, 0.4, 0.4, {}},
                                              default_perturbation_tables(), {}, rng);
      SceneObservation obs{query.instruction, InlineSceneSource{serialize(query)}, ""};
      bool abstained = false;
      for (int t = 0; t <= 20; ++t) {
        AgentConfig c;
        c.theta = t / 20.0;
        Agent agent(library, perceptor, encoder, c);
        RuleBasedEvaluator evaluator;
        const auto d = agent.inference_step(obs, memory, evaluator);
        CHECK((d.verdict == Verdict::kAct) == d.chosen.has_value());
        if (d.chosen) CHECK(d.chosen->score.s_w >= c.theta);
        if (abstained) CHECK(d.verdict == Verdict::kNoConfidentMatch);
        abstained = abstained || d.verdict == Verdict::kNoConfidentMatch;
      }
    }
  }

  TEST_CASE("inference leaves memory untouched") {
    Rig rig;
    memograph::testing::TempDir dir;
    MemoGraphStore store = MemoGraphStore::open(dir.path() / "m.jsonl");
    ScriptedPlanner planner({{"take the cup", take_cup()}, {"refill", refill_mug()}});
    ReportOutcomeEvaluator report;
    auto backend = sim();
    rig.agent.learning_step(scene_obs("scene_take_cup.json", "take the cup"), planner, *backend,
                            report, store);
    rig.agent.learning_step(scene_obs("scene_tea.json", "refill it", "spill"), planner, *backend,
                            report, store);
    const auto before = store.retrieve_all();
    RuleBasedEvaluator evaluator;
    for (int i = 0; i < 5; ++i) {
      rig.agent.inference_step(scene_obs("scene_tea.json", std::nullopt), store, evaluator);
    }
    CHECK(store.retrieve_all() == before);
    CHECK(MemoGraphStore::load(dir.path() / "m.jsonl").retrieve_all() == before);
  }

  TEST_CASE("successful_only hides failed episodes") {
    AgentConfig c;
    c.successful_only = true;
    Rig rig(c);
    MemoGraphStore store;
    ScriptedPlanner planner({{"refill", refill_mug()}});
    ReportOutcomeEvaluator report;
    rig.agent.learning_step(scene_obs("scene_tea.json", "refill", "spill"), planner, *sim(),
                            report, store);
    RuleBasedEvaluator evaluator;
    const auto d = rig.agent.inference_step(scene_obs("scene_tea.json", "refill"), store, evaluator);
    CHECK(d.verdict == Verdict::kNoConfidentMatch);
    CHECK(d.alternatives.empty());
  }

  TEST_CASE("encoder failure propagates") {
    const SkillLibrary library = default_skill_library();
    MockPerceptor perceptor;
    ThrowingEncoder encoder;
    Agent agent(library, perceptor, encoder);
    const TaskGraph g = load_scene_file(fixture_path("scene_take_cup.json"));
    const std::vector<EpisodeGraph> memory{{1, g, take_cup(), {}, 0}};
    RuleBasedEvaluator evaluator;
    CHECK_THROWS_AS(agent.inference_step(scene_obs("scene_take_cup.json", "x"), memory, evaluator),
                    TransportError);
  }

  TEST_CASE("parameter remapping follows the node assignment") {
    DeterministicEncoder encoder;
    const TaskGraph memory_graph{{{"cup", "cup", {}}, {"table", "table", {}}},
                                 {{"cup", "table", "on"}}, std::nullopt};
    const TaskGraph scene{{{"mug_7", "cup", {}}, {"table", "table", {}}},
                          {{"mug_7", "table", "on"}}, std::nullopt};
    const MatchScore s = match_graphs(scene, memory_graph, {}, encoder);
    const ActionRecord action{"refill_tea", {{"target", "cup"}, {"source", "kettle"}}, ""};
    const auto remapped = remap_action_params(action, memory_graph, scene, s.node_assignment);
    REQUIRE(remapped);
    CHECK(*remapped->param("target") == "mug_7");
    CHECK(*remapped->param("source") == "kettle");

    const TaskGraph bare{{{"lamp", "lamp", {}}}, {}, std::nullopt};
    const MatchScore none = match_graphs(bare, memory_graph, {}, encoder);
    CHECK_FALSE(remap_action_params(action, memory_graph, bare, none.node_assignment));
  }

  TEST_CASE("interactive outcome evaluator") {
    std::ostringstream prompt;
    std::istringstream answers("partial 0.5 half full\nbogus\n");
    InteractiveOutcomeEvaluator evaluator(answers, prompt);
    const ExecutionReport report{ExecutionStatus::kSuccess, true, 10, "ok"};
    const auto o = evaluator.evaluate(report, {}, take_cup());
    CHECK(o.status == OutcomeStatus::kPartial);
    CHECK(o.score == 0.5);
    CHECK(o.notes == "half full");
    CHECK(prompt.str().find("receive_object") != std::string::npos);
    CHECK_THROWS_AS(evaluator.evaluate(report, {}, take_cup()), ArgumentError);
    CHECK_THROWS_AS(evaluator.evaluate(report, {}, take_cup()), ArgumentError);
  }

  TEST_CASE("remote planner") {
    const SkillLibrary library = default_skill_library();
    const TaskGraph scene = load_scene_file(fixture_path("scene_tea.json"));
    const auto obs = scene_obs("scene_tea.json", "please refill my teacup");
    auto ok = ReplayTransport::of_fixtures({"recorded/planner_ok.json"});
    RemotePlanner planner(remote_client(), ok);
    const ActionRecord a = planner.plan(obs, scene, library);
    CHECK(a.skill_id == "refill_tea");
    CHECK(*a.param("target") == "mug");
    const auto& body = ok->requests.at(0).body;
    CHECK(body["instruction"] == "please refill my teacup");
    CHECK(body["skills"].size() == library.size());

    auto unknown = ReplayTransport::of_fixtures({"recorded/planner_unknown_skill.json"});
    RemotePlanner bad(remote_client(), unknown);
    CHECK_THROWS_AS(bad.plan(obs, scene, library), PlanningError);
    CHECK(unknown->requests.size() == 3);
  }

  TEST_CASE("remote evaluator") {
    Rig rig;
    MemoGraphStore store;
    const ActionRecord take_mug{"receive_object", {{"object", "mug"}}, ""};
    ScriptedPlanner planner({{"take the teacup", take_mug}, {"refill", refill_mug()}});
    ReportOutcomeEvaluator report;
    auto backend = sim();
    rig.agent.learning_step(scene_obs("scene_tea.json", "take the teacup"), planner, *backend,
                            report, store);
    rig.agent.learning_step(scene_obs("scene_tea.json", "refill my teacup"), planner, *backend,
                            report, store);
    // Episode 1 ranks first; the recorded reply selects episode 2.
    const auto query = scene_obs("scene_tea.json", "take the teacup");

    SUBCASE("selection may skip the top candidate") {
      auto t = ReplayTransport::of_fixtures({"recorded/evaluator_select.json"});
      RemoteEvaluator evaluator(remote_client(), t);
      const auto d = rig.agent.inference_step(query, store, evaluator);
      REQUIRE(d.verdict == Verdict::kAct);
      CHECK(d.chosen->score.memory_episode_id == 2);
      CHECK(d.chosen->action.skill_id == "refill_tea");
      CHECK(d.rationale == "same teacup on the table, the pot is full");
      const auto& body = t->requests.at(0).body;
      CHECK(body["candidates"].size() == 2);
      CHECK(body["candidates"][0]["action"]["skill_id"] == "receive_object");
      CHECK(body["response_schema"] == evaluator_response_schema());
    }
    SUBCASE("abstention") {
      RemoteEvaluator evaluator(remote_client(),
                                ReplayTransport::of_fixtures({"recorded/evaluator_abstain.json"}));
      const auto d = rig.agent.inference_step(query, store, evaluator);
      CHECK(d.verdict == Verdict::kNoConfidentMatch);
      CHECK(d.rationale == "no remembered scene has a teapot");
    }
    SUBCASE("invalid replies fall back to the rule") {
      auto t = ReplayTransport::of_fixtures({"recorded/evaluator_bad.json"});
      RemoteEvaluator evaluator(remote_client(), t);
      const auto d = rig.agent.inference_step(query, store, evaluator);
      CHECK(d.verdict == Verdict::kAct);
      CHECK(d.chosen->score.memory_episode_id == 1);
      CHECK(d.rationale.rfind("fallback: ", 0) == 0);
      CHECK(t->requests.size() == 3);
    }
    SUBCASE("transport failure is not masked") {
      RemoteEvaluator evaluator(remote_client(), make_default_transport());
      CHECK_THROWS_AS(rig.agent.inference_step(query, store, evaluator), TransportError);
    }
  }

  TEST_CASE("episode loop terminates on done") {
    Rig rig;
    MemoGraphStore store;
    ScriptedPlanner planner({{"take the cup", take_cup()}});
    ReportOutcomeEvaluator report;
    auto backend = sim();
    rig.agent.learning_step(scene_obs("scene_take_cup.json", "take the cup"), planner, *backend,
                            report, store);
    RuleBasedEvaluator evaluator;
    const SessionLog log = rig.agent.run_episode_loop(
        [](std::size_t) { return scene_obs("scene_take_cup.json", "take the cup"); }, store,
        evaluator, *backend);
    CHECK(log.termination == Termination::kDone);
    REQUIRE(log.entries.size() == 1);
    CHECK(log.entries[0].chosen_skill == std::optional<std::string>("receive_object"));

    const std::string jsonl = log.to_jsonl();
    CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 1);
    const auto line = nlohmann::json::parse(jsonl);
    CHECK(line["step"] == 1);
    CHECK(line["verdict"] == "act");
    CHECK(line["s_w"] == 1.0);
    CHECK(line["execution"]["done"] == true);
    CHECK(line["scene_digest"].get<std::string>().size() > 0);
  }

  TEST_CASE("episode loop stops without a confident match") {
    Rig rig;
    MemoGraphStore store;
    RuleBasedEvaluator evaluator;
    auto backend = sim();
    const SessionLog log = rig.agent.run_episode_loop(
        [](std::size_t) { return scene_obs("scene_take_cup.json", std::nullopt); }, store,
        evaluator, *backend);
    CHECK(log.termination == Termination::kNoConfidentMatch);
    CHECK(log.entries.size() == 1);
    CHECK(backend->calls() == 0);
    CHECK(nlohmann::json::parse(log.to_jsonl())["chosen_skill"].is_null());
  }

  TEST_CASE("episode loop is capped") {
    Rig rig;
    MemoGraphStore store;
    const ActionRecord push{"push_chair", {{"target", "cup"}}, "nudge"};
    ScriptedPlanner planner({{"", push}});
    ReportOutcomeEvaluator report;
    auto backend = sim();
    rig.agent.learning_step(scene_obs("scene_take_cup.json", "push"), planner, *backend, report,
                            store);
    FixedEvaluator evaluator;
    std::vector<std::size_t> steps;
    const SessionLog log = rig.agent.run_episode_loop(
        [&steps](std::size_t step) {
          steps.push_back(step);
          return scene_obs("scene_take_cup.json", "push");
        },
        store, evaluator, *backend);
    CHECK(log.termination == Termination::kIncomplete);
    CHECK(log.entries.size() == 10);
    CHECK(evaluator.calls == 10);
    CHECK(steps.back() == 10);
    CHECK(to_string(log.termination) == "incomplete");
  }
}
