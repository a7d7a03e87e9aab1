#include "memograph/skills.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "assets.hpp"

namespace memograph {

namespace {

std::string kind_name(ParamKind kind) {
  switch (kind) {
    case ParamKind::kText:
      return "text";
    case ParamKind::kNumber:
      return "number";
    case ParamKind::kEnum:
      return "enum";
  }
  return "text";
}

ParamKind kind_from_name(const std::string& name, const std::string& field) {
  if (name == "text") return ParamKind::kText;
  if (name == "number") return ParamKind::kNumber;
  if (name == "enum") return ParamKind::kEnum;
  throw SchemaError(field, "unknown param kind '" + name + "'");
}

bool parses_as_number(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last && std::isfinite(value);
}

std::string get_string(const nlohmann::json& obj, const char* key,
                       const std::string& path, bool required = true) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) throw SchemaError(path + "." + key, "missing required field");
    return {};
  }
  if (!it->is_string()) throw SchemaError(path + "." + key, "expected string");
  return it->get<std::string>();
}

}  // namespace

void SkillLibrary::register_skill(SkillPrimitive primitive) {
  std::vector<std::string> violations;
  if (primitive.skill_id.empty()) violations.push_back("skill_id empty");
  if (primitive.description.empty()) {
    violations.push_back("skill " + primitive.skill_id + " description empty");
  }
  std::set<std::string> keys;
  for (const auto& p : primitive.param_schema) {
    if (!keys.insert(p.key).second) {
      violations.push_back("skill " + primitive.skill_id + " duplicate param key " + p.key);
    }
    if (p.kind == ParamKind::kEnum && p.allowed_values.empty()) {
      violations.push_back("skill " + primitive.skill_id + " enum param " + p.key +
                           " has no allowed values");
    }
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
  if (contains(primitive.skill_id)) {
    throw ConflictError("skill '" + primitive.skill_id + "' already registered");
  }
  skills_.push_back(std::move(primitive));
}

const SkillPrimitive& SkillLibrary::lookup(const std::string& skill_id) const {
  for (const auto& s : skills_) {
    if (s.skill_id == skill_id) return s;
  }
  throw NotFoundError("skill '" + skill_id + "' not in library");
}

bool SkillLibrary::contains(const std::string& skill_id) const {
  for (const auto& s : skills_) {
    if (s.skill_id == skill_id) return true;
  }
  return false;
}

ValidationResult SkillLibrary::validate_params(const std::string& skill_id,
                                               const std::vector<KeyValue>& params) const {
  const SkillPrimitive& skill = lookup(skill_id);
  ValidationResult result;
  auto& out = result.violations;
  std::set<std::string> seen;
  for (const auto& kv : params) {
    if (!seen.insert(kv.key).second) {
      out.push_back("param " + kv.key + " repeated");
      continue;
    }
    const ParamSpec* spec = nullptr;
    for (const auto& p : skill.param_schema) {
      if (p.key == kv.key) spec = &p;
    }
    if (spec == nullptr) {
      out.push_back("param " + kv.key + " not accepted by " + skill_id);
      continue;
    }
    if (spec->kind == ParamKind::kNumber && !parses_as_number(kv.value)) {
      out.push_back("param " + kv.key + " must be a number");
    }
    if (spec->kind == ParamKind::kEnum &&
        std::find(spec->allowed_values.begin(), spec->allowed_values.end(), kv.value) ==
            spec->allowed_values.end()) {
      out.push_back("param " + kv.key + " value '" + kv.value + "' not allowed");
    }
  }
  for (const auto& p : skill.param_schema) {
    if (p.required && !seen.contains(p.key)) {
      out.push_back("param " + p.key + " required");
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

nlohmann::ordered_json library_to_json(const SkillLibrary& library) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& s : library.list()) {
    nlohmann::ordered_json item;
    item["skill_id"] = s.skill_id;
    item["name"] = s.name;
    item["description"] = s.description;
    nlohmann::ordered_json params = nlohmann::ordered_json::array();
    for (const auto& p : s.param_schema) {
      nlohmann::ordered_json spec;
      spec["key"] = p.key;
      spec["kind"] = kind_name(p.kind);
      spec["required"] = p.required;
      spec["allowed"] = p.allowed_values;
      params.push_back(std::move(spec));
    }
    item["params"] = std::move(params);
    item["executor"] = s.executor_binding;
    arr.push_back(std::move(item));
  }
  return arr;
}

SkillLibrary library_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw SchemaError("", "skill manifest must be an array");
  SkillLibrary library;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string path = "[" + std::to_string(i) + "]";
    const auto& item = doc[i];
    if (!item.is_object()) throw SchemaError(path, "expected object");
    SkillPrimitive s;
    s.skill_id = get_string(item, "skill_id", path);
    s.name = get_string(item, "name", path, false);
    if (s.name.empty()) s.name = s.skill_id;
    s.description = get_string(item, "description", path);
    s.executor_binding = get_string(item, "executor", path, false);
    if (item.contains("params")) {
      const auto& params = item["params"];
      if (!params.is_array()) throw SchemaError(path + ".params", "expected array");
      for (std::size_t j = 0; j < params.size(); ++j) {
        const std::string ppath = path + ".params[" + std::to_string(j) + "]";
        if (!params[j].is_object()) throw SchemaError(ppath, "expected object");
        ParamSpec spec;
        spec.key = get_string(params[j], "key", ppath);
        spec.kind = kind_from_name(get_string(params[j], "kind", ppath), ppath + ".kind");
        spec.required = params[j].value("required", false);
        if (params[j].contains("allowed")) {
          for (const auto& v : params[j]["allowed"]) {
            if (!v.is_string()) throw SchemaError(ppath + ".allowed", "expected strings");
            spec.allowed_values.push_back(v.get<std::string>());
          }
        }
        s.param_schema.push_back(std::move(spec));
      }
    }
    library.register_skill(std::move(s));
  }
  return library;
}

SkillLibrary load_skill_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open skill manifest " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return library_from_json(parse_json_text(buffer.str()));
}

SkillLibrary default_skill_library() {
  return library_from_json(nlohmann::json::parse(assets::kDefaultSkills));
}

// ---------------------------------------------------------------------------

std::string to_string(ExecutionStatus status) {
  return status == ExecutionStatus::kSuccess ? "success" : "failure";
}

ExecutionReport ExecutionBackend::execute(const SkillPrimitive& skill,
                                          const std::vector<KeyValue>& params,
                                          const std::string& scenario_tag) {
  std::lock_guard lock(mutex_);
  return do_execute(skill, params, scenario_tag);
}

void SimulationBackend::add_fixture(const std::string& skill_id,
                                    const std::string& scenario_tag,
                                    ExecutionReport report) {
  fixtures_[{skill_id, scenario_tag}] = std::move(report);
}

std::shared_ptr<SimulationBackend> SimulationBackend::from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw SchemaError("", "fixture table must be an array");
  auto backend = std::make_shared<SimulationBackend>();
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string path = "[" + std::to_string(i) + "]";
    const auto& item = doc[i];
    if (!item.is_object()) throw SchemaError(path, "expected object");
    ExecutionReport report;
    const std::string status = get_string(item, "status", path);
    if (status != "success" && status != "failure") {
      throw SchemaError(path + ".status", "expected success|failure");
    }
    report.status = status == "success" ? ExecutionStatus::kSuccess
                                        : ExecutionStatus::kFailure;
    report.task_done = item.value("done", false);
    report.duration_ms = item.value("duration_ms", std::int64_t{0});
    report.notes = get_string(item, "notes", path, false);
    std::string scenario = get_string(item, "scenario", path, false);
    backend->add_fixture(get_string(item, "skill_id", path),
                         scenario.empty() ? "*" : scenario, std::move(report));
  }
  return backend;
}

ExecutionReport SimulationBackend::do_execute(const SkillPrimitive& skill,
                                              const std::vector<KeyValue>&,
                                              const std::string& scenario_tag) {
  ++calls_;
  auto it = fixtures_.find({skill.skill_id, scenario_tag});
  if (it == fixtures_.end()) it = fixtures_.find({skill.skill_id, "*"});
  if (it == fixtures_.end()) {
    throw FixtureMissingError("no simulation fixture for skill '" + skill.skill_id +
                              "' in scenario '" + scenario_tag + "'");
  }
  return it->second;
}

void BackendRegistry::add(std::shared_ptr<ExecutionBackend> backend) {
  if (!backend) throw ArgumentError("null backend");
  const std::string name = backend->name();
  backends_[name] = std::move(backend);
}

ExecutionBackend& BackendRegistry::get(const std::string& name) const {
  auto it = backends_.find(name);
  if (it == backends_.end()) {
    throw BackendUnavailableError("execution backend '" + name + "' unavailable");
  }
  return *it->second;
}

ExecutionReport execute(const SkillLibrary& library, const std::string& skill_id,
                        const std::vector<KeyValue>& params,
                        const BackendRegistry& backends, const std::string& backend,
                        const std::string& scenario_tag) {
  const SkillPrimitive& skill = library.lookup(skill_id);
  auto check = library.validate_params(skill_id, params);
  if (!check.ok()) throw ValidationError(std::move(check.violations));
  return backends.get(backend).execute(skill, params, scenario_tag);
}

}  // namespace memograph
