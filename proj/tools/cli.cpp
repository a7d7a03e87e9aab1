#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "memograph/agent.hpp"
#include "memograph/harness.hpp"
#include "memograph/memostore.hpp"

namespace memograph::cli {

namespace {

struct Options {
  std::string memo;
  std::string skills;
  std::string config;
  std::string encoder = "deterministic";

  // ingest
  std::vector<std::string> scenes;
  std::optional<std::string> instruction;
  std::string skill;
  std::vector<std::string> params;
  std::string description;
  std::string outcome = "success";
  double score = 1.0;
  std::string notes;
  bool adjudicate = false;

  // match / infer
  std::string scene;
  std::string weights;
  std::optional<double> tau;
  std::optional<std::size_t> top_k;
  std::string scoring;
  std::optional<double> theta;
  std::string mode;

  // experiment
  std::string families;
  std::string tables;
  std::string sizes = "1-20";
  std::size_t trials = 50;
  std::string modes = "instruction,intuitive";
  std::uint64_t seed = 0;
  std::optional<double> rate;
  std::string csv;
  std::string report;
  std::size_t threads = 0;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ArgumentError("bad " + what + " '" + text + "'");
  }
  return value;
}

std::size_t parse_count(const std::string& text) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ArgumentError("bad memory size '" + text + "'");
  }
  return value;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out.flush()) throw IoError("write to " + path + " failed");
}

SkillLibrary load_library(const Options& o) {
  return o.skills.empty() ? default_skill_library() : load_skill_manifest(o.skills);
}

AgentConfig load_config(const Options& o) {
  AgentConfig config;
  if (!o.config.empty()) config = agent_config_from_json(parse_json_text(read_file(o.config)));
  if (!o.weights.empty()) {
    const auto parts = split(o.weights, ',');
    if (parts.size() != 3) throw ArgumentError("--weights expects alpha,beta,gamma");
    config.match.weights = {parse_double(parts[0], "weight"), parse_double(parts[1], "weight"),
                            parse_double(parts[2], "weight")};
  }
  if (o.tau) config.match.tau = *o.tau;
  if (o.top_k) config.top_k = *o.top_k;
  if (!o.scoring.empty()) config.match.mode = scoring_mode_from_string(o.scoring);
  if (o.theta) config.theta = *o.theta;
  config.validate();
  return config;
}

std::shared_ptr<Encoder> load_encoder(const Options& o) {
  EncoderConfig config;
  if (o.encoder == "remote") {
    config.kind = EncoderKind::kRemote;
    config = config.with_environment();
  } else if (o.encoder != "deterministic") {
    throw ArgumentError("--encoder must be deterministic or remote");
  }
  return make_encoder(config);
}

// Loads the memory file, which must exist.
MemoGraphStore load_memory(const Options& o) {
  if (o.memo.empty()) throw ArgumentError("--memo is required");
  if (!std::filesystem::exists(o.memo)) throw IoError("memory file " + o.memo + " not found");
  return MemoGraphStore::load(o.memo);
}

KeyValue parse_param(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ArgumentError("--param expects key=value, got '" + text + "'");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

int cmd_ingest(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
  if (o.memo.empty()) throw ArgumentError("--memo is required");
  const SkillLibrary library = load_library(o);
  ActionRecord action{o.skill, {}, o.description};
  for (const auto& p : o.params) action.params.push_back(parse_param(p));
  if (!library.contains(action.skill_id)) {
    throw ArgumentError("skill '" + action.skill_id + "' not in library");
  }
  const auto check = library.validate_params(action.skill_id, action.params);
  if (!check.ok()) throw ArgumentError("invalid --param: " + check.violations.front());

  OutcomeRecord outcome;
  try {
    outcome.status = outcome_status_from_string(o.outcome);
  } catch (const Error& e) {
    throw ArgumentError(e.what());
  }
  if (!(o.score >= 0.0 && o.score <= 1.0)) throw ArgumentError("--score must lie in [0, 1]");
  outcome.score = o.score;
  outcome.notes = o.notes;

  std::vector<EpisodeDraft> drafts;
  const std::int64_t now = now_millis();
  for (const auto& path : o.scenes) {
    TaskGraph scene = load_scene_file(path);
    if (o.instruction) scene.instruction = *o.instruction;
    drafts.push_back({std::move(scene), action, outcome, now});
  }
  if (o.adjudicate) {
    // Outcomes of runs made outside this tool, judged by the operator.
    InteractiveOutcomeEvaluator judge(in, err);
    const ExecutionReport report{ExecutionStatus::kSuccess, true, 0, "run outside memograph"};
    for (std::size_t i = 0; i < drafts.size(); ++i) {
      err << o.scenes[i] << "\n";
      drafts[i].outcome = judge.evaluate(report, drafts[i].graph, action);
    }
  }
  MemoGraphStore store = MemoGraphStore::open(o.memo);
  for (auto id : store.store_batch(drafts)) out << id << "\n";
  return kOk;
}

int cmd_match(const Options& o, std::ostream& out) {
  const AgentConfig config = load_config(o);
  const MemoGraphStore store = load_memory(o);
  const TaskGraph query = load_scene_file(o.scene);
  auto encoder = load_encoder(o);
  const auto memory = store.retrieve_all({.successful_only = config.successful_only});
  const auto results = rank_memory(query, memory, config.match, config.top_k, *encoder);
  out << match_report(query, results).dump(2) << "\n";
  return kOk;
}

int cmd_infer(const Options& o, std::ostream& out) {
  const AgentConfig config = load_config(o);
  const SkillLibrary library = load_library(o);
  const MemoGraphStore store = load_memory(o);
  auto encoder = load_encoder(o);
  MockPerceptor perceptor;
  SceneObservation obs;
  obs.source = SceneFileSource{o.scene};
  obs.instruction = o.instruction ? o.instruction : load_scene_file(o.scene).instruction;
  if (!o.mode.empty() && perception_mode_from_string(o.mode) == PerceptionMode::kIntuitive) {
    obs = obs.intuitive();
  } else if (o.mode == "instruction" && !obs.instruction) {
    throw ArgumentError("instruction mode needs an instruction in the scene or --instruction");
  }
  Agent agent(library, perceptor, *encoder, config);
  RuleBasedEvaluator evaluator;
  const InferenceDecision d = agent.inference_step(obs, store, evaluator);
  out << decision_to_json(d).dump(2) << "\n";
  return d.verdict == Verdict::kAct ? kOk : kNoConfidentMatch;
}

int cmd_experiment(const Options& o, std::ostream& out) {
  ExperimentConfig config;
  config.agent = load_config(o);
  config.sizes = parse_sizes(o.sizes);
  config.trials = o.trials;
  config.modes.clear();
  for (const auto& m : split(o.modes, ',')) config.modes.push_back(perception_mode_from_string(m));
  config.seed = o.seed;
  config.rate = o.rate;
  config.threads = o.threads;
  const SkillLibrary library = load_library(o);
  const auto families = o.families.empty() ? default_families() : load_families(o.families);
  const auto tables = o.tables.empty()
                          ? default_perturbation_tables()
                          : perturbation_tables_from_json(parse_json_text(read_file(o.tables)));
  const ExperimentReport report = run_experiment(families, tables, library, config);
  if (!o.report.empty()) write_file(o.report, report.to_json().dump(2) + "\n");
  if (!o.csv.empty()) {
    write_file(o.csv, report.to_csv());
  } else {
    out << report.to_csv();
  }
  return kOk;
}

int cmd_stats(const Options& o, std::ostream& out) {
  const MemoGraphStore store = load_memory(o);
  nlohmann::ordered_json doc;
  doc["episodes"] = store.count();
  nlohmann::ordered_json skills = nlohmann::ordered_json::object();
  for (const auto& [skill, s] : store.stats()) {
    skills[skill] = {{"episodes", s.episodes},
                     {"successes", s.successes},
                     {"success_rate", s.success_rate}};
  }
  doc["skills"] = std::move(skills);
  out << doc.dump(2) << "\n";
  return kOk;
}

}  // namespace

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& part : split(text, ',')) {
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_count(part));
      continue;
    }
    const std::size_t lo = parse_count(part.substr(0, dash));
    const std::size_t hi = parse_count(part.substr(dash + 1));
    if (lo > hi) throw ArgumentError("bad size range '" + part + "'");
    for (std::size_t s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw ArgumentError("no memory sizes given");
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return run(args, std::cin, out, err);
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  Options o;
  CLI::App app{"Scene-graph episodic memory: ingest, match, infer, experiment"};
  app.require_subcommand(1);
  app.add_option("--memo", o.memo, "Memory file (one episode per line)");
  app.add_option("--skills", o.skills, "Skill manifest (default: built-in library)");
  app.add_option("--config", o.config, "Agent config JSON (weights, tau, theta, ...)");
  app.add_option("--encoder", o.encoder, "deterministic or remote");

  auto* ingest = app.add_subcommand("ingest", "Store one episode per scene file");
  ingest->add_option("scenes", o.scenes, "Scene files")->required();
  ingest->add_option("--instruction", o.instruction, "Instruction for every scene");
  ingest->add_option("--skill", o.skill, "Skill id of the action taken")->required();
  ingest->add_option("--param", o.params, "Action parameter key=value");
  ingest->add_option("--description", o.description, "Action description");
  ingest->add_option("--outcome", o.outcome, "success, failure or partial");
  ingest->add_option("--score", o.score, "Outcome score in [0, 1]");
  ingest->add_option("--notes", o.notes, "Outcome notes");
  ingest->add_flag("--adjudicate", o.adjudicate,
                   "Ask for each scene's outcome on stdin instead of --outcome/--score");

  auto add_match_flags = [&o](CLI::App* sub) {
    sub->add_option("scene", o.scene, "Query scene file")->required();
    sub->add_option("--weights", o.weights, "alpha,beta,gamma");
    sub->add_option("--tau", o.tau, "Similarity threshold");
    sub->add_option("--top-k", o.top_k, "Results to keep");
    sub->add_option("--scoring", o.scoring, "matched_over_max or matrix_mean");
  };
  auto* match = app.add_subcommand("match", "Rank memory against a scene");
  add_match_flags(match);

  auto* infer = app.add_subcommand("infer", "Decide on an action for a scene");
  add_match_flags(infer);
  infer->add_option("--theta", o.theta, "Acceptance threshold on the fused score");
  infer->add_option("--mode", o.mode, "instruction or intuitive");
  infer->add_option("--instruction", o.instruction, "Override the scene's instruction");

  auto* experiment = app.add_subcommand("experiment", "Success rate against memory size");
  experiment->add_option("--families", o.families, "Families file (default: built-in)");
  experiment->add_option("--tables", o.tables, "Perturbation tables (default: built-in)");
  experiment->add_option("--sizes", o.sizes, "Memory sizes, e.g. 1-20 or 1,5,10");
  experiment->add_option("--trials", o.trials, "Trials per cell");
  experiment->add_option("--modes", o.modes, "Comma-separated modes");
  experiment->add_option("--seed", o.seed, "Seed");
  experiment->add_option("--rate", o.rate, "Override every perturbation rate");
  experiment->add_option("--theta", o.theta, "Acceptance threshold on the fused score");
  experiment->add_option("--csv", o.csv, "Write the CSV here instead of stdout");
  experiment->add_option("--report", o.report, "Write the JSON report here");
  experiment->add_option("--threads", o.threads, "Worker threads (0: all cores)");

  auto* stats = app.add_subcommand("stats", "Per-skill success statistics");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kArgumentError;
  }

  try {
    if (*ingest) return cmd_ingest(o, in, out, err);
    if (*match) return cmd_match(o, out);
    if (*infer) return cmd_infer(o, out);
    if (*experiment) return cmd_experiment(o, out);
    if (*stats) return cmd_stats(o, out);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kArgumentError;
  } catch (const NotFoundError& e) {
    err << "error: " << e.what() << "\n";
    return kArgumentError;
  } catch (const ConflictError& e) {
    err << "error: " << e.what() << "\n";
    return kArgumentError;
  } catch (const TransportError& e) {
    err << "remote error: " << e.what() << "\n";
    return kRemoteError;
  } catch (const PerceptionError& e) {
    err << "remote error: " << e.what() << "\n";
    return kRemoteError;
  } catch (const Error& e) {
    // I/O, parse, schema and validation failures of input files.
    err << "error: " << e.what() << "\n";
    return kIoError;
  }
  return kFailure;
}

}  // namespace memograph::cli
