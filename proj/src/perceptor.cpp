#include "memograph/perceptor.hpp"

#include <fstream>
#include <sstream>

#include "assets.hpp"
#include "memograph/json_schema.hpp"

namespace memograph {

namespace {

void replace_all(std::string& text, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
}

std::string strip_comment_lines(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '#') continue;
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace

std::string to_string(PerceptionMode mode) {
  return mode == PerceptionMode::kInstruction ? "instruction" : "intuitive";
}

PerceptionMode perception_mode_from_string(const std::string& text) {
  if (text == "instruction") return PerceptionMode::kInstruction;
  if (text == "intuitive") return PerceptionMode::kIntuitive;
  throw ArgumentError("unknown mode '" + text + "' (expected instruction|intuitive)");
}

SceneObservation SceneObservation::intuitive() const {
  SceneObservation out = *this;
  out.instruction.reset();
  return out;
}

PerceptionError::PerceptionError(Kind kind, const std::string& message,
                                 std::string raw_response)
    : Error(message), kind_(kind), raw_response_(std::move(raw_response)) {}

// ---------------------------------------------------------------------------

TaskGraph parse_scene_document(const std::string& text) {
  return deserialize_graph(text);
}

TaskGraph load_scene_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scene file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_scene_document(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line(), e.field());
  } catch (const SchemaError& e) {
    throw SchemaError(e.field(), path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    std::vector<std::string> named;
    for (const auto& v : e.violations()) named.push_back(path.string() + ": " + v);
    throw ValidationError(std::move(named));
  }
}

TaskGraph MockPerceptor::extract_scene_graph(const SceneObservation& obs) {
  TaskGraph graph;
  if (const auto* file = std::get_if<SceneFileSource>(&obs.source)) {
    graph = load_scene_file(file->path);
  } else if (const auto* inline_doc = std::get_if<InlineSceneSource>(&obs.source)) {
    graph = parse_scene_document(inline_doc->document);
  } else {
    throw ArgumentError("mock perceptor needs a scene file or inline scene");
  }
  graph.instruction = obs.instruction;
  require_valid(graph);
  return graph;
}

// ---------------------------------------------------------------------------

std::string_view default_perceptor_prompt() {
  static const std::string prompt = strip_comment_lines(assets::kPerceptorPrompt);
  return prompt;
}

const nlohmann::json& default_scene_graph_schema() {
  static const nlohmann::json schema = nlohmann::json::parse(assets::kSceneGraphSchema);
  return schema;
}

std::string render_perceptor_prompt(const std::string& prompt_template,
                                    const ImageSource& image,
                                    const std::optional<std::string>& instruction) {
  std::string objects;
  for (const auto& o : image.objects_of_interest) {
    objects += (objects.empty() ? "" : ", ") + o;
  }
  if (objects.empty()) objects = "objects and agents";

  std::string out = prompt_template;
  replace_all(out, "{object1}", "one entity");
  replace_all(out, "{object2}", "another entity");
  replace_all(out, "{object}", objects);
  replace_all(out, "{image}", "the image " + image.image_ref);
  replace_all(out, "{instruction}",
              instruction ? "\"" + *instruction + "\"" : std::string("none"));
  if (!image.context.empty()) out += "Context: " + image.context + "\n";
  return out;
}

TaskGraph validate_response(const std::string& raw, const nlohmann::json& schema) {
  const nlohmann::json doc = parse_json_text(raw);
  const auto violations = check_schema(doc, schema);
  if (!violations.empty()) {
    throw SchemaError(violations.front().path, violations.front().message);
  }
  TaskGraph graph = graph_from_json(doc);
  require_valid(graph);
  return graph;
}

RemotePerceptor::RemotePerceptor(PerceptorConfig config,
                                 std::shared_ptr<JsonTransport> transport)
    : config_(std::move(config)), client_(config_.client, std::move(transport)) {}

nlohmann::json RemotePerceptor::build_request(const SceneObservation& obs) const {
  const auto* image = std::get_if<ImageSource>(&obs.source);
  if (image == nullptr) throw ArgumentError("remote perceptor needs an image source");
  nlohmann::json payload;
  payload["prompt"] = render_perceptor_prompt(config_.prompt_template, *image,
                                              obs.instruction);
  payload["image"] = image->image_ref;
  payload["response_schema"] = config_.response_schema;
  return payload;
}

TaskGraph RemotePerceptor::extract_scene_graph(const SceneObservation& obs) {
  const nlohmann::json payload = build_request(obs);
  std::string last_raw;
  TaskGraph graph;
  try {
    graph = client_.request<TaskGraph>(
        payload,
        [this](const std::string& raw) {
          return validate_response(raw, config_.response_schema);
        },
        [&last_raw](const std::string& raw) { last_raw = raw; });
  } catch (const ParseError& e) {
    throw PerceptionError(PerceptionError::Kind::kParse,
                          std::string("perceptor response unparseable: ") + e.what(),
                          last_raw);
  } catch (const SchemaError& e) {
    throw PerceptionError(PerceptionError::Kind::kSchema,
                          std::string("perceptor response violates schema: ") + e.what(),
                          last_raw);
  } catch (const ValidationError& e) {
    throw PerceptionError(PerceptionError::Kind::kGraph,
                          std::string("perceptor graph invalid: ") + e.what(), last_raw);
  }
  graph.instruction = obs.instruction;
  require_valid(graph);
  return graph;
}

}  // namespace memograph
