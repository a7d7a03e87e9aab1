#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "memograph/errors.hpp"
#include "memograph/taskgraph.hpp"

namespace memograph {

enum class ParamKind { kText, kNumber, kEnum };

struct ParamSpec {
  std::string key;
  ParamKind kind = ParamKind::kText;
  bool required = false;
  std::vector<std::string> allowed_values;  // kEnum only

  friend bool operator==(const ParamSpec&, const ParamSpec&) = default;
};

// A parameterized motion primitive. The description is semantic text that
// planners and evaluators read as context.
struct SkillPrimitive {
  std::string skill_id;
  std::string name;
  std::string description;
  std::vector<ParamSpec> param_schema;
  std::string executor_binding;

  friend bool operator==(const SkillPrimitive&, const SkillPrimitive&) = default;
};

// Registry of primitives in registration order.
class SkillLibrary {
 public:
  // Throws ConflictError on a duplicate id, ValidationError on a malformed
  // primitive.
  void register_skill(SkillPrimitive primitive);

  // Throws NotFoundError on a miss.
  const SkillPrimitive& lookup(const std::string& skill_id) const;
  bool contains(const std::string& skill_id) const;
  const std::vector<SkillPrimitive>& list() const { return skills_; }
  std::size_t size() const { return skills_.size(); }
  bool empty() const { return skills_.empty(); }

  // Required keys present, no unknown or repeated keys, numbers parse,
  // enum values allowed. Throws NotFoundError for an unknown skill.
  ValidationResult validate_params(const std::string& skill_id,
                                   const std::vector<KeyValue>& params) const;

  friend bool operator==(const SkillLibrary&, const SkillLibrary&) = default;

 private:
  std::vector<SkillPrimitive> skills_;
};

// Manifest: JSON array of
//   {"skill_id", "name", "description",
//    "params": [{"key", "kind": "text|number|enum", "required", "allowed"}],
//    "executor"}
nlohmann::ordered_json library_to_json(const SkillLibrary& library);
SkillLibrary library_from_json(const nlohmann::json& doc);
SkillLibrary load_skill_manifest(const std::filesystem::path& path);

// The four experimental tasks plus a no-op.
SkillLibrary default_skill_library();

// --- Execution ------------------------------------------------------------

class BackendUnavailableError : public Error {
 public:
  using Error::Error;
};

class FixtureMissingError : public Error {
 public:
  using Error::Error;
};

enum class ExecutionStatus { kSuccess, kFailure };

std::string to_string(ExecutionStatus status);

struct ExecutionReport {
  ExecutionStatus status = ExecutionStatus::kSuccess;
  bool task_done = false;  // the overall task needs no further actions
  std::int64_t duration_ms = 0;
  std::string notes;

  friend bool operator==(const ExecutionReport&, const ExecutionReport&) = default;
};

// Calls into one backend are serialized.
class ExecutionBackend {
 public:
  virtual ~ExecutionBackend() = default;
  virtual std::string name() const = 0;

  ExecutionReport execute(const SkillPrimitive& skill,
                          const std::vector<KeyValue>& params,
                          const std::string& scenario_tag);

 protected:
  virtual ExecutionReport do_execute(const SkillPrimitive& skill,
                                     const std::vector<KeyValue>& params,
                                     const std::string& scenario_tag) = 0;

 private:
  std::mutex mutex_;
};

// Scripted outcomes keyed by (skill id, scenario tag). A fixture registered
// under scenario "*" answers for any tag of that skill.
class SimulationBackend : public ExecutionBackend {
 public:
  std::string name() const override { return "sim"; }

  void add_fixture(const std::string& skill_id, const std::string& scenario_tag,
                   ExecutionReport report);

  // [{"skill_id", "scenario", "status", "done", "duration_ms", "notes"}]
  static std::shared_ptr<SimulationBackend> from_json(const nlohmann::json& doc);

  std::size_t calls() const { return calls_; }

 protected:
  ExecutionReport do_execute(const SkillPrimitive& skill,
                             const std::vector<KeyValue>& params,
                             const std::string& scenario_tag) override;

 private:
  std::map<std::pair<std::string, std::string>, ExecutionReport> fixtures_;
  std::size_t calls_ = 0;
};

// Real-robot execution. Deployments provide a subclass bound to their
// middleware; no implementation ships here.
class HardwareBackend : public ExecutionBackend {
 public:
  std::string name() const override { return "hardware"; }
};

class BackendRegistry {
 public:
  void add(std::shared_ptr<ExecutionBackend> backend);
  // Throws BackendUnavailableError.
  ExecutionBackend& get(const std::string& name) const;

 private:
  std::map<std::string, std::shared_ptr<ExecutionBackend>> backends_;
};

// Looks up the skill, validates params, and runs it on the named backend.
ExecutionReport execute(const SkillLibrary& library, const std::string& skill_id,
                        const std::vector<KeyValue>& params,
                        const BackendRegistry& backends, const std::string& backend,
                        const std::string& scenario_tag = {});

}  // namespace memograph
