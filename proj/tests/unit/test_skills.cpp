#include <doctest.h>

#include <algorithm>
#include <fstream>

#include "fixtures.hpp"
#include "memograph/skills.hpp"
#include "temp_dir.hpp"

using namespace memograph;
using memograph::testing::fixture_path;

namespace {

SkillPrimitive primitive(const std::string& id) {
  return {id, id, "does " + id, {{"target", ParamKind::kText, true, {}}}, "sim." + id};
}

bool mentions(const ValidationResult& r, const std::string& word) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [&](const std::string& v) { return v.find(word) != std::string::npos; });
}

}  // namespace

TEST_SUITE("skills") {
  TEST_CASE("default library holds the four tasks") {
    const SkillLibrary lib = default_skill_library();
    for (const char* id : {"receive_object", "lift_desk_assist", "push_chair", "refill_tea"}) {
      CHECK(lib.contains(id));
      CHECK_FALSE(lib.lookup(id).description.empty());
    }
  }

  TEST_CASE("register and lookup") {
    SkillLibrary lib;
    lib.register_skill(primitive("receive_object"));
    CHECK(lib.lookup("receive_object") == primitive("receive_object"));
    CHECK_THROWS_AS(lib.register_skill(primitive("receive_object")), ConflictError);
    CHECK_THROWS_AS(lib.lookup("juggle"), NotFoundError);
    lib.register_skill(primitive("b"));
    lib.register_skill(primitive("a"));
    CHECK(lib.list()[1].skill_id == "b");
    CHECK(lib.list()[2].skill_id == "a");
    CHECK(lib.size() == 3);
  }

  TEST_CASE("malformed primitives are rejected") {
    SkillLibrary lib;
    CHECK_THROWS_AS(lib.register_skill(primitive("")), ValidationError);
    SkillPrimitive empty_enum = primitive("x");
    empty_enum.param_schema.push_back({"mode", ParamKind::kEnum, false, {}});
    CHECK_THROWS_AS(lib.register_skill(empty_enum), ValidationError);
    CHECK(lib.empty());
  }

  TEST_CASE("validate_params") {
    const SkillLibrary lib = default_skill_library();
    CHECK(lib.validate_params("refill_tea", {{"target", "cup_1"}}).ok());
    const auto missing = lib.validate_params("refill_tea", {{"source", "pot"}});
    CHECK_FALSE(missing.ok());
    CHECK(mentions(missing, "target"));
    const auto bad_enum = lib.validate_params("receive_object", {{"object", "cup"}, {"hand", "third"}});
    CHECK_FALSE(bad_enum.ok());
    CHECK(mentions(bad_enum, "hand"));
    CHECK_FALSE(lib.validate_params("lift_desk_assist", {{"target", "desk"}, {"height_m", "tall"}}).ok());
    CHECK(lib.validate_params("lift_desk_assist", {{"target", "desk"}, {"height_m", "0.25"}}).ok());
    CHECK_FALSE(lib.validate_params("refill_tea", {{"target", "a"}, {"target", "b"}}).ok());
    CHECK(mentions(lib.validate_params("refill_tea", {{"target", "a"}, {"colour", "b"}}), "colour"));
    CHECK_THROWS_AS(lib.validate_params("juggle", {}), NotFoundError);
  }

  TEST_CASE("manifest round trip") {
    const SkillLibrary lib = default_skill_library();
    CHECK(library_from_json(library_to_json(lib)) == lib);
    memograph::testing::TempDir dir;
    const auto path = dir.path() / "skills.json";
    std::ofstream(path) << library_to_json(lib).dump(2);
    CHECK(load_skill_manifest(path) == lib);
    CHECK_THROWS_AS(load_skill_manifest(dir.path() / "absent.json"), IoError);
    CHECK_THROWS_AS(library_from_json(nlohmann::json::object()), SchemaError);
    CHECK_THROWS_AS(library_from_json(nlohmann::json::parse(
                        R"([{"skill_id":"x","name":"x","description":"d","executor":"e",
                            "params":[{"key":"k","kind":"colour"}]}])")),
                    SchemaError);
  }

  TEST_CASE("simulation backend") {
    const SkillLibrary lib = default_skill_library();
    auto sim = SimulationBackend::from_json(
        nlohmann::json::parse(memograph::testing::read_fixture("sim_fixtures.json")));
    BackendRegistry backends;
    backends.add(sim);

    const auto ok = execute(lib, "receive_object", {{"object", "cup"}}, backends, "sim");
    CHECK(ok.status == ExecutionStatus::kSuccess);
    CHECK(ok.task_done);
    CHECK(ok.duration_ms == 1200);

    const auto spilled = execute(lib, "refill_tea", {{"target", "cup"}}, backends, "sim", "spill");
    CHECK(spilled.status == ExecutionStatus::kFailure);
    CHECK(spilled.notes == "tea spilled");
    CHECK(execute(lib, "refill_tea", {{"target", "cup"}}, backends, "sim", "calm").status ==
          ExecutionStatus::kSuccess);

    CHECK_THROWS_AS(execute(lib, "lift_desk_assist", {{"target", "desk"}}, backends, "sim"),
                    FixtureMissingError);
    CHECK_THROWS_AS(execute(lib, "receive_object", {{"object", "cup"}}, backends, "hardware"),
                    BackendUnavailableError);
    const std::size_t before = sim->calls();
    CHECK_THROWS_AS(execute(lib, "receive_object", {}, backends, "sim"), ValidationError);
    CHECK_THROWS_AS(execute(lib, "juggle", {}, backends, "sim"), NotFoundError);
    CHECK(sim->calls() == before);
  }

  TEST_CASE("fixture table errors") {
    CHECK_THROWS_AS(SimulationBackend::from_json(nlohmann::json::object()), SchemaError);
    CHECK_THROWS_AS(SimulationBackend::from_json(nlohmann::json::parse(
                        R"([{"skill_id":"x","scenario":"*","status":"meh"}])")),
                    SchemaError);
    CHECK(to_string(ExecutionStatus::kFailure) == "failure");
  }
}
