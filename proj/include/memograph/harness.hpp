#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "memograph/agent.hpp"
#include "memograph/perceptor.hpp"
#include "memograph/skills.hpp"
#include "memograph/taskgraph.hpp"

namespace memograph {

// Seeded generator with its own uniform conversion so draws are identical
// on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();                          // [0, 1)
  std::size_t below(std::size_t n);          // [0, n), n > 0
  bool chance(double p) { return uniform() < p; }

  template <class T>
  const T& pick(const std::vector<T>& items) {
    return items[below(items.size())];
  }

 private:
  std::mt19937_64 engine_;
};

// Mixes a parent seed with stream labels into a child seed.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> labels);

struct PerturbationSpec {
  double synonym_rate = 0.0;
  double attribute_flip_rate = 0.0;
  double node_add_drop_rate = 0.0;
  // Alternative instruction templates, chosen with probability synonym_rate.
  std::vector<std::string> instruction_rephrases;

  // Throws ArgumentError when a rate leaves [0, 1].
  void validate() const;
  // Same rephrases, every rate set to `rate`.
  PerturbationSpec with_rate(double rate) const;
};

// Vocabulary the perturbation draws from.
struct PerturbationTables {
  std::map<std::string, std::vector<std::string>> synonyms;          // word -> alternatives
  std::map<std::string, std::vector<std::string>> attribute_values;  // key -> values
  std::vector<NodeEntity> extra_objects;
  std::vector<std::string> extra_relations;
};

// {"synonyms": {word: [..]}, "attribute_values": {key: [..]},
//  "extra_objects": [{"label", "attributes"}], "extra_relations": [..]}
PerturbationTables perturbation_tables_from_json(const nlohmann::json& doc);
PerturbationTables default_perturbation_tables();

// One of the experimental tasks. Instruction templates name nodes as
// {node_id} and are filled with the node's (possibly perturbed) label.
struct ScenarioFamily {
  std::string family_id;
  TaskGraph base_scene;  // instruction unset
  std::string instruction;
  ActionRecord action;
  // Each variant replaces the listed nodes (matched by id) of base_scene.
  std::vector<std::vector<NodeEntity>> variants;
  // Node ids never dropped; action param values are always protected.
  std::vector<std::string> protected_ids;
  PerturbationSpec perturbation;
  std::uint64_t seed = 0;

  // Base scene valid, rates in range, action names a library skill with
  // valid params, every variant node id exists. Throws ValidationError.
  void validate(const SkillLibrary& library) const;

  // The scene of variant `index` with its instruction filled in.
  TaskGraph instantiate(std::size_t index) const;
};

// {"families": [{"family_id", "base_scene": <graph object or path>,
//   "instruction", "rephrases", "action", "variants": [[node, ..], ..],
//   "protected", "perturbation": {"synonym_rate", "attribute_flip_rate",
//   "node_add_drop_rate"}, "seed"}]}
// Relative scene paths resolve against `base_dir`.
std::vector<ScenarioFamily> families_from_json(const nlohmann::json& doc,
                                               const std::filesystem::path& base_dir = {});
std::vector<ScenarioFamily> load_families(const std::filesystem::path& path);
std::vector<ScenarioFamily> default_families();

// Applies label synonyms, attribute flips, one node drop and one node add
// (each with the spec's probability), and an instruction rephrase.
// `instruction_template` is refilled from the perturbed labels; pass an
// empty template to keep graph.instruction as is. Protected nodes are never
// dropped. The result is always a valid graph.
TaskGraph perturb(const TaskGraph& graph, const std::string& instruction_template,
                  const PerturbationSpec& spec, const PerturbationTables& tables,
                  const std::vector<std::string>& protected_ids, Rng& rng);

// Like perturb(), but retries until the canonical result differs from the
// input and, failing that, adds an extra node.
TaskGraph perturb_changed(const TaskGraph& graph, const std::string& instruction_template,
                          const PerturbationSpec& spec, const PerturbationTables& tables,
                          const std::vector<std::string>& protected_ids, Rng& rng);

// Fills {node_id} placeholders with node labels.
std::string fill_instruction(const std::string& instruction_template, const TaskGraph& graph);

// A perturbed scene of `family`: random variant, random rephrase.
TaskGraph sample_family_scene(const ScenarioFamily& family, const PerturbationSpec& spec,
                              const PerturbationTables& tables, Rng& rng);

// --- Experiment -------------------------------------------------------------

struct ExperimentConfig {
  std::vector<std::size_t> sizes;
  std::size_t trials = 50;
  std::vector<PerceptionMode> modes{PerceptionMode::kInstruction,
                                    PerceptionMode::kIntuitive};
  std::uint64_t seed = 0;
  // Replaces every family's perturbation rates when set.
  std::optional<double> rate;
  AgentConfig agent;
  std::size_t threads = 0;  // 0: hardware concurrency

  void validate() const;
};

struct CellResult {
  std::string family;
  PerceptionMode mode = PerceptionMode::kInstruction;
  std::size_t memory_size = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;

  double rate() const {
    return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials);
  }
};

struct ExperimentReport {
  ExperimentConfig config;
  // Sorted by family, mode, memory size.
  std::vector<CellResult> cells;

  // family,mode,memory_size,trials,successes,rate
  std::string to_csv() const;
  nlohmann::ordered_json to_json() const;

  const CellResult* find(const std::string& family, PerceptionMode mode,
                         std::size_t memory_size) const;
};

// For each memory size m a fresh store is filled with m instructed
// episodes per family, each learned from a perturbed scene. Each family
// then gets `trials` fresh perturbed scenes, inferred in every mode; a
// trial succeeds when the agent acts with the family's skill. Runs no
// remote code and depends only on the config.
ExperimentReport run_experiment(const std::vector<ScenarioFamily>& families,
                                const PerturbationTables& tables,
                                const SkillLibrary& library, const ExperimentConfig& config);

// Spearman rank correlation with average ranks for ties. Returns 0 when
// either sequence is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace memograph
