#include "memograph/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "assets.hpp"
#include "memograph/embedding.hpp"
#include "memograph/memostore.hpp"

namespace memograph {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_rate(double rate, const char* name) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw ArgumentError(std::string(name) + " must lie in [0, 1]");
  }
}

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> words;
  std::istringstream in(text);
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) out += (out.empty() ? "" : " ") + w;
  return out;
}

// Node ids named as {id} in a template.
std::vector<std::string> placeholders(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = text.find('{', pos)) != std::string::npos) {
    const auto end = text.find('}', pos);
    if (end == std::string::npos) break;
    out.push_back(text.substr(pos + 1, end - pos - 1));
    pos = end + 1;
  }
  return out;
}

std::string unique_extra_id(const TaskGraph& graph) {
  for (std::size_t k = 1;; ++k) {
    std::string id = "extra_" + std::to_string(k);
    if (graph.find_node(id) == nullptr) return id;
  }
}

std::vector<NodeEntity> nodes_from_json(const json& arr, const std::string& path) {
  if (!arr.is_array()) throw SchemaError(path, "expected array of nodes");
  try {
    return graph_from_json(json{{"nodes", arr}, {"links", json::array()}}).nodes;
  } catch (const SchemaError& e) {
    throw SchemaError(path + "." + e.field(), e.what());
  }
}

std::vector<std::string> string_list(const json& doc, const char* key, const std::string& path) {
  std::vector<std::string> out;
  auto it = doc.find(key);
  if (it == doc.end()) return out;
  if (!it->is_array()) throw SchemaError(path + "." + key, "expected array of strings");
  for (const auto& v : *it) {
    if (!v.is_string()) throw SchemaError(path + "." + key, "expected array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::vector<std::string> family_protected(const ScenarioFamily& family) {
  std::vector<std::string> ids = family.protected_ids;
  for (const auto& kv : family.action.params) ids.push_back(kv.value);
  for (auto& id : placeholders(family.instruction)) ids.push_back(std::move(id));
  for (const auto& r : family.perturbation.instruction_rephrases) {
    for (auto& id : placeholders(r)) ids.push_back(std::move(id));
  }
  return ids;
}

std::string format_rate(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", rate);
  return buf;
}

}  // namespace

// --- Rng --------------------------------------------------------------------

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::below(std::size_t n) {
  if (n == 0) throw ArgumentError("Rng::below needs n > 0");
  return static_cast<std::size_t>(engine_() % n);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> labels) {
  std::uint64_t h = splitmix64(seed);
  for (auto l : labels) h = splitmix64(h ^ splitmix64(l + 0x51ed2705ULL));
  return h;
}

// --- Perturbation -----------------------------------------------------------

void PerturbationSpec::validate() const {
  check_rate(synonym_rate, "synonym_rate");
  check_rate(attribute_flip_rate, "attribute_flip_rate");
  check_rate(node_add_drop_rate, "node_add_drop_rate");
}

PerturbationSpec PerturbationSpec::with_rate(double rate) const {
  check_rate(rate, "perturbation rate");
  PerturbationSpec out = *this;
  out.synonym_rate = out.attribute_flip_rate = out.node_add_drop_rate = rate;
  return out;
}

PerturbationTables perturbation_tables_from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("", "perturbation tables must be an object");
  PerturbationTables t;
  auto read_map = [&doc](const char* key, std::map<std::string, std::vector<std::string>>& out) {
    auto it = doc.find(key);
    if (it == doc.end()) return;
    if (!it->is_object()) throw SchemaError(key, "expected object");
    for (const auto& [word, alts] : it->items()) {
      out[word] = string_list(*it, word.c_str(), key);
    }
  };
  read_map("synonyms", t.synonyms);
  read_map("attribute_values", t.attribute_values);
  if (doc.contains("extra_objects")) {
    const json& arr = doc["extra_objects"];
    if (!arr.is_array()) throw SchemaError("extra_objects", "expected array");
    json nodes = json::array();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      json n = arr[i];
      if (!n.is_object()) throw SchemaError("extra_objects", "expected objects");
      n["id"] = "extra_" + std::to_string(i + 1);
      nodes.push_back(std::move(n));
    }
    t.extra_objects = nodes_from_json(nodes, "extra_objects");
  }
  t.extra_relations = string_list(doc, "extra_relations", "");
  return t;
}

PerturbationTables default_perturbation_tables() {
  return perturbation_tables_from_json(json::parse(assets::kPerturbationTables));
}

std::string fill_instruction(const std::string& instruction_template, const TaskGraph& graph) {
  std::string out;
  std::size_t pos = 0;
  while (pos < instruction_template.size()) {
    const auto open = instruction_template.find('{', pos);
    const auto close = open == std::string::npos ? open : instruction_template.find('}', open);
    if (close == std::string::npos) {
      out += instruction_template.substr(pos);
      break;
    }
    out += instruction_template.substr(pos, open - pos);
    const std::string id = instruction_template.substr(open + 1, close - open - 1);
    const NodeEntity* node = graph.find_node(id);
    out += node != nullptr ? node->label : id;
    pos = close + 1;
  }
  return out;
}

TaskGraph perturb(const TaskGraph& graph, const std::string& instruction_template,
                  const PerturbationSpec& spec, const PerturbationTables& tables,
                  const std::vector<std::string>& protected_ids, Rng& rng) {
  spec.validate();
  TaskGraph out = canonicalize(graph);

  for (auto& node : out.nodes) {
    auto words = split_words(node.label);
    for (auto& w : words) {
      auto it = tables.synonyms.find(w);
      if (it != tables.synonyms.end() && !it->second.empty() && rng.chance(spec.synonym_rate)) {
        w = rng.pick(it->second);
      }
    }
    if (!words.empty()) node.label = join_words(words);
    for (auto& attr : node.attributes) {
      auto it = tables.attribute_values.find(attr.key);
      if (it == tables.attribute_values.end()) continue;
      std::vector<std::string> others;
      for (const auto& v : it->second) {
        if (v != attr.value) others.push_back(v);
      }
      if (!others.empty() && rng.chance(spec.attribute_flip_rate)) attr.value = rng.pick(others);
    }
  }

  if (rng.chance(spec.node_add_drop_rate)) {
    std::vector<std::string> droppable;
    for (const auto& n : out.nodes) {
      if (std::find(protected_ids.begin(), protected_ids.end(), n.id) == protected_ids.end()) {
        droppable.push_back(n.id);
      }
    }
    if (!droppable.empty() && out.nodes.size() > 1) {
      const std::string victim = rng.pick(droppable);
      std::erase_if(out.nodes, [&](const NodeEntity& n) { return n.id == victim; });
      std::erase_if(out.links, [&](const LinkRelation& l) {
        return l.source_id == victim || l.target_id == victim;
      });
    }
  }

  if (rng.chance(spec.node_add_drop_rate) && !tables.extra_objects.empty() &&
      !out.nodes.empty()) {
    NodeEntity extra = rng.pick(tables.extra_objects);
    extra.id = unique_extra_id(out);
    const std::string anchor = rng.pick(out.nodes).id;
    const std::string relation =
        tables.extra_relations.empty() ? "near" : rng.pick(tables.extra_relations);
    out.links.push_back({extra.id, anchor, relation});
    out.nodes.push_back(std::move(extra));
  }

  if (!instruction_template.empty()) {
    std::string tmpl = instruction_template;
    if (!spec.instruction_rephrases.empty() && rng.chance(spec.synonym_rate)) {
      tmpl = rng.pick(spec.instruction_rephrases);
    }
    out.instruction = fill_instruction(tmpl, out);
  }
  return canonicalize(out);
}

TaskGraph perturb_changed(const TaskGraph& graph, const std::string& instruction_template,
                          const PerturbationSpec& spec, const PerturbationTables& tables,
                          const std::vector<std::string>& protected_ids, Rng& rng) {
  const std::string original = serialize(canonicalize(graph));
  for (int attempt = 0; attempt < 32; ++attempt) {
    TaskGraph out = perturb(graph, instruction_template, spec, tables, protected_ids, rng);
    if (serialize(out) != original) return out;
  }
  if (tables.extra_objects.empty() || graph.nodes.empty()) {
    throw ArgumentError("perturbation cannot change this graph");
  }
  TaskGraph out = canonicalize(graph);
  NodeEntity extra = rng.pick(tables.extra_objects);
  extra.id = unique_extra_id(out);
  out.links.push_back({extra.id, rng.pick(out.nodes).id,
                       tables.extra_relations.empty() ? "near"
                                                      : rng.pick(tables.extra_relations)});
  out.nodes.push_back(std::move(extra));
  return canonicalize(out);
}

// --- Families ---------------------------------------------------------------

void ScenarioFamily::validate(const SkillLibrary& library) const {
  std::vector<std::string> out;
  if (family_id.empty()) out.push_back("family_id empty");
  for (const auto& v : validate_graph(base_scene).violations) {
    out.push_back(family_id + ": base_scene: " + v);
  }
  try {
    perturbation.validate();
  } catch (const ArgumentError& e) {
    out.push_back(family_id + ": " + e.what());
  }
  if (!library.contains(action.skill_id)) {
    out.push_back(family_id + ": skill " + action.skill_id + " not in library");
  } else {
    for (const auto& v : library.validate_params(action.skill_id, action.params).violations) {
      out.push_back(family_id + ": action: " + v);
    }
  }
  if (instruction.empty()) out.push_back(family_id + ": instruction empty");
  for (std::size_t i = 0; i < variants.size(); ++i) {
    for (const auto& n : variants[i]) {
      if (base_scene.find_node(n.id) == nullptr) {
        out.push_back(family_id + ": variant " + std::to_string(i) + " node " + n.id +
                      " not in base_scene");
      }
    }
  }
  std::vector<std::string> named = protected_ids;
  for (auto& id : placeholders(instruction)) named.push_back(std::move(id));
  for (const auto& r : perturbation.instruction_rephrases) {
    for (auto& id : placeholders(r)) named.push_back(std::move(id));
  }
  for (const auto& id : named) {
    if (base_scene.find_node(id) == nullptr) {
      out.push_back(family_id + ": node " + id + " not in base_scene");
    }
  }
  if (!out.empty()) throw ValidationError(std::move(out));
}

TaskGraph ScenarioFamily::instantiate(std::size_t index) const {
  TaskGraph scene = base_scene;
  if (!variants.empty()) {
    if (index >= variants.size()) throw ArgumentError("variant index out of range");
    for (const auto& replacement : variants[index]) {
      for (auto& n : scene.nodes) {
        if (n.id == replacement.id) n = replacement;
      }
    }
  }
  scene.instruction = fill_instruction(instruction, scene);
  return scene;
}

TaskGraph sample_family_scene(const ScenarioFamily& family, const PerturbationSpec& spec,
                              const PerturbationTables& tables, Rng& rng) {
  const std::size_t variant = family.variants.empty() ? 0 : rng.below(family.variants.size());
  PerturbationSpec full = spec;
  full.instruction_rephrases = family.perturbation.instruction_rephrases;
  return perturb(family.instantiate(variant), family.instruction, full, tables,
                 family_protected(family), rng);
}

std::vector<ScenarioFamily> families_from_json(const json& doc,
                                               const std::filesystem::path& base_dir) {
  if (!doc.is_object() || !doc.contains("families") || !doc["families"].is_array()) {
    throw SchemaError("families", "expected {\"families\": [...]}");
  }
  std::vector<ScenarioFamily> out;
  std::set<std::string> ids;
  const json& arr = doc["families"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = "families[" + std::to_string(i) + "]";
    const json& f = arr[i];
    if (!f.is_object()) throw SchemaError(path, "expected object");
    ScenarioFamily fam;
    auto str = [&](const char* key) {
      if (!f.contains(key) || !f[key].is_string()) {
        throw SchemaError(path + "." + key, "expected string");
      }
      return f[key].get<std::string>();
    };
    fam.family_id = str("family_id");
    if (!ids.insert(fam.family_id).second) {
      throw SchemaError(path + ".family_id", "duplicate family " + fam.family_id);
    }
    if (!f.contains("base_scene")) throw SchemaError(path + ".base_scene", "missing");
    if (f["base_scene"].is_string()) {
      fam.base_scene = load_scene_file(base_dir / f["base_scene"].get<std::string>());
    } else {
      fam.base_scene = graph_from_json(f["base_scene"]);
    }
    fam.base_scene.instruction.reset();
    fam.instruction = str("instruction");
    if (!f.contains("action") || !f["action"].is_object()) {
      throw SchemaError(path + ".action", "expected object");
    }
    const json& a = f["action"];
    if (!a.contains("skill_id") || !a["skill_id"].is_string()) {
      throw SchemaError(path + ".action.skill_id", "expected string");
    }
    fam.action.skill_id = a["skill_id"].get<std::string>();
    fam.action.description = a.value("description", std::string{});
    if (a.contains("params")) {
      if (!a["params"].is_array()) throw SchemaError(path + ".action.params", "expected array");
      for (const auto& p : a["params"]) {
        if (!p.is_object() || !p.contains("key") || !p.contains("value") ||
            !p["key"].is_string() || !p["value"].is_string()) {
          throw SchemaError(path + ".action.params", "expected {key, value} strings");
        }
        fam.action.params.push_back({p["key"].get<std::string>(), p["value"].get<std::string>()});
      }
    }
    if (f.contains("variants")) {
      if (!f["variants"].is_array()) throw SchemaError(path + ".variants", "expected array");
      for (std::size_t v = 0; v < f["variants"].size(); ++v) {
        fam.variants.push_back(nodes_from_json(
            f["variants"][v], path + ".variants[" + std::to_string(v) + "]"));
      }
    }
    fam.protected_ids = string_list(f, "protected", path);
    fam.perturbation.instruction_rephrases = string_list(f, "rephrases", path);
    if (f.contains("perturbation")) {
      const json& p = f["perturbation"];
      if (!p.is_object()) throw SchemaError(path + ".perturbation", "expected object");
      try {
        fam.perturbation.synonym_rate = p.value("synonym_rate", 0.0);
        fam.perturbation.attribute_flip_rate = p.value("attribute_flip_rate", 0.0);
        fam.perturbation.node_add_drop_rate = p.value("node_add_drop_rate", 0.0);
      } catch (const json::exception&) {
        throw SchemaError(path + ".perturbation", "rates must be numbers");
      }
    }
    if (f.contains("seed")) {
      if (!f["seed"].is_number_unsigned()) {
        throw SchemaError(path + ".seed", "expected nonnegative integer");
      }
      fam.seed = f["seed"].get<std::uint64_t>();
    }
    out.push_back(std::move(fam));
  }
  return out;
}

std::vector<ScenarioFamily> load_families(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open families file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return families_from_json(parse_json_text(buffer.str()), path.parent_path());
}

std::vector<ScenarioFamily> default_families() {
  return families_from_json(json::parse(assets::kTaskFamilies));
}

// --- Experiment -------------------------------------------------------------

void ExperimentConfig::validate() const {
  if (sizes.empty()) throw ArgumentError("experiment needs at least one memory size");
  for (auto s : sizes) {
    if (s == 0) throw ArgumentError("memory sizes must be positive");
  }
  if (trials == 0) throw ArgumentError("trials must be positive");
  if (modes.empty()) throw ArgumentError("experiment needs at least one mode");
  if (rate) check_rate(*rate, "perturbation rate");
  agent.validate();
}

std::string ExperimentReport::to_csv() const {
  std::string out = "family,mode,memory_size,trials,successes,rate\n";
  for (const auto& c : cells) {
    out += c.family + "," + to_string(c.mode) + "," + std::to_string(c.memory_size) + "," +
           std::to_string(c.trials) + "," + std::to_string(c.successes) + "," +
           format_rate(c.rate()) + "\n";
  }
  return out;
}

ordered_json ExperimentReport::to_json() const {
  ordered_json doc;
  doc["seed"] = config.seed;
  ordered_json cfg;
  cfg["sizes"] = config.sizes;
  cfg["trials"] = config.trials;
  ordered_json modes = ordered_json::array();
  for (auto m : config.modes) modes.push_back(to_string(m));
  cfg["modes"] = std::move(modes);
  cfg["rate"] = config.rate ? ordered_json(*config.rate) : ordered_json(nullptr);
  cfg["agent"] = agent_config_to_json(config.agent);
  doc["config"] = std::move(cfg);
  ordered_json arr = ordered_json::array();
  for (const auto& c : cells) {
    ordered_json cell;
    cell["family"] = c.family;
    cell["mode"] = to_string(c.mode);
    cell["memory_size"] = c.memory_size;
    cell["trials"] = c.trials;
    cell["successes"] = c.successes;
    cell["rate"] = c.rate();
    arr.push_back(std::move(cell));
  }
  doc["cells"] = std::move(arr);
  return doc;
}

const CellResult* ExperimentReport::find(const std::string& family, PerceptionMode mode,
                                         std::size_t memory_size) const {
  for (const auto& c : cells) {
    if (c.family == family && c.mode == mode && c.memory_size == memory_size) return &c;
  }
  return nullptr;
}

ExperimentReport run_experiment(const std::vector<ScenarioFamily>& families,
                                const PerturbationTables& tables,
                                const SkillLibrary& library, const ExperimentConfig& config) {
  config.validate();
  if (families.empty()) throw ArgumentError("experiment needs at least one family");
  for (const auto& f : families) f.validate(library);

  std::vector<PerturbationSpec> specs;
  for (const auto& f : families) {
    specs.push_back(config.rate ? f.perturbation.with_rate(*config.rate) : f.perturbation);
  }

  // Trial scenes depend on the family only, so every memory size is scored
  // on the same trials.
  std::vector<std::vector<TaskGraph>> trials(families.size());
  for (std::size_t f = 0; f < families.size(); ++f) {
    Rng rng(derive_seed(config.seed, {2, families[f].seed, f}));
    for (std::size_t t = 0; t < config.trials; ++t) {
      trials[f].push_back(sample_family_scene(families[f], specs[f], tables, rng));
    }
  }

  auto encoder = std::make_shared<CachingEncoder>(std::make_shared<DeterministicEncoder>(),
                                                  std::size_t{1} << 16);
  auto backend_for = [&families]() {
    auto backend = std::make_shared<SimulationBackend>();
    for (const auto& f : families) {
      backend->add_fixture(f.action.skill_id, "*",
                           {ExecutionStatus::kSuccess, true, 0, "scripted"});
    }
    return backend;
  };

  std::vector<std::vector<CellResult>> per_size(config.sizes.size());
  auto run_size = [&](std::size_t size_index) {
    const std::size_t m = config.sizes[size_index];
    MockPerceptor perceptor;
    Agent agent(library, perceptor, *encoder, config.agent);
    std::int64_t tick = 0;
    agent.set_clock([&tick] { return ++tick; });
    auto backend = backend_for();
    ReportOutcomeEvaluator outcome;
    MemoGraphStore store;

    // The store for size m holds the first m draws of each family's
    // episode stream, interleaved by family.
    std::vector<Rng> streams;
    std::vector<ScriptedPlanner> planners;
    for (std::size_t f = 0; f < families.size(); ++f) {
      streams.emplace_back(derive_seed(config.seed, {1, families[f].seed, f}));
      planners.emplace_back(std::vector<ScriptedPlanner::Rule>{{"", families[f].action}});
    }
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t f = 0; f < families.size(); ++f) {
        const TaskGraph scene = sample_family_scene(families[f], specs[f], tables, streams[f]);
        SceneObservation obs{scene.instruction, InlineSceneSource{serialize(scene)},
                             families[f].family_id};
        agent.learning_step(obs, planners[f], *backend, outcome, store);
      }
    }

    const std::vector<EpisodeGraph> memory = store.retrieve_all();
    RuleBasedEvaluator evaluator;
    std::vector<CellResult> cells;
    for (std::size_t f = 0; f < families.size(); ++f) {
      for (auto mode : config.modes) {
        CellResult cell{families[f].family_id, mode, m, 0, 0};
        for (const auto& scene : trials[f]) {
          SceneObservation obs{scene.instruction, InlineSceneSource{serialize(scene)},
                               families[f].family_id};
          if (mode == PerceptionMode::kIntuitive) obs = obs.intuitive();
          const InferenceDecision d = agent.inference_step(obs, memory, evaluator);
          ++cell.trials;
          if (d.verdict == Verdict::kAct && d.chosen &&
              d.chosen->action.skill_id == families[f].action.skill_id) {
            ++cell.successes;
          }
        }
        cells.push_back(std::move(cell));
      }
    }
    per_size[size_index] = std::move(cells);
  };

  std::size_t threads = config.threads != 0 ? config.threads
                                            : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, config.sizes.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < config.sizes.size(); i = next++) run_size(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = config.sizes.size();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentReport report;
  report.config = config;
  for (auto& cells : per_size) {
    for (auto& c : cells) report.cells.push_back(std::move(c));
  }
  std::sort(report.cells.begin(), report.cells.end(), [](const CellResult& a, const CellResult& b) {
    return std::tie(a.family, a.mode, a.memory_size) < std::tie(b.family, b.mode, b.memory_size);
  });
  return report;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ArgumentError("spearman needs equal-length sequences");
  const std::size_t n = x.size();
  auto ranks = [n](const std::vector<double>& v) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace memograph
