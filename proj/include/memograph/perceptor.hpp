#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "memograph/errors.hpp"
#include "memograph/model_client.hpp"
#include "memograph/taskgraph.hpp"

namespace memograph {

enum class PerceptionMode { kInstruction, kIntuitive };

std::string to_string(PerceptionMode mode);
PerceptionMode perception_mode_from_string(const std::string& text);

// Structured scene description on disk (mock input).
struct SceneFileSource {
  std::filesystem::path path;
};

// Scene document already in memory, same schema as a scene file.
struct InlineSceneSource {
  std::string document;
};

// Camera frame reference handed to a remote model.
struct ImageSource {
  std::string image_ref;
  std::string context;
  std::vector<std::string> objects_of_interest;
};

using SceneSource = std::variant<SceneFileSource, InlineSceneSource, ImageSource>;

// What the robot observes at one step. The mode is derived from whether an
// instruction is present.
struct SceneObservation {
  std::optional<std::string> instruction;
  SceneSource source;
  // Keys simulation fixtures; not seen by perception.
  std::string scenario_tag;

  PerceptionMode mode() const {
    return instruction ? PerceptionMode::kInstruction : PerceptionMode::kIntuitive;
  }

  // Copy with the instruction removed.
  SceneObservation intuitive() const;
};

// Raised after a remote perception call exhausted its retries on invalid
// responses. Carries the last raw response for logging.
class PerceptionError : public Error {
 public:
  enum class Kind { kParse, kSchema, kGraph };

  PerceptionError(Kind kind, const std::string& message, std::string raw_response);
  Kind kind() const { return kind_; }
  const std::string& raw_response() const { return raw_response_; }

 private:
  Kind kind_;
  std::string raw_response_;
};

// Intuitive Perceptor: observation in, validated task graph out. The
// returned graph's instruction equals the observation's.
class Perceptor {
 public:
  virtual ~Perceptor() = default;
  virtual TaskGraph extract_scene_graph(const SceneObservation& obs) = 0;
};

// Scene file contents: the graph document schema plus an optional
// "instruction".
TaskGraph parse_scene_document(const std::string& text);
TaskGraph load_scene_file(const std::filesystem::path& path);

// Declarative passthrough of scene files. Never touches the network.
class MockPerceptor : public Perceptor {
 public:
  TaskGraph extract_scene_graph(const SceneObservation& obs) override;
};

// Shipped assets, compiled in from assets/.
std::string_view default_perceptor_prompt();
const nlohmann::json& default_scene_graph_schema();

// Substitutes {image}, {object}, {instruction}, {object1}, {object2}.
// Intuitive observations render the instruction as "none".
std::string render_perceptor_prompt(const std::string& prompt_template,
                                    const ImageSource& image,
                                    const std::optional<std::string>& instruction);

// Parse -> schema check -> graph mapping -> graph validation. Raises
// ParseError, SchemaError, or ValidationError respectively.
TaskGraph validate_response(const std::string& raw, const nlohmann::json& schema);

struct PerceptorConfig {
  ModelClientConfig client;
  std::string prompt_template{default_perceptor_prompt()};
  nlohmann::json response_schema = default_scene_graph_schema();
};

// Request body:
//   {"model", "prompt", "image", "response_schema"}
// Response: one scene-graph document.
class RemotePerceptor : public Perceptor {
 public:
  RemotePerceptor(PerceptorConfig config, std::shared_ptr<JsonTransport> transport);

  TaskGraph extract_scene_graph(const SceneObservation& obs) override;

  nlohmann::json build_request(const SceneObservation& obs) const;

 private:
  PerceptorConfig config_;
  ModelClient client_;
};

}  // namespace memograph
