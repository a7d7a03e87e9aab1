#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"
#include "memograph/memostore.hpp"
#include "temp_dir.hpp"

using namespace memograph;
using memograph::testing::fixture_path;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args, const std::string& input = {}) {
  args.insert(args.begin(), "memograph_cli");
  std::istringstream in(input);
  std::ostringstream out, err;
  Run r;
  r.code = memograph::cli::run(args, in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string fx(const std::string& name) { return fixture_path(name).string(); }

std::string file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("parse_sizes") {
    using memograph::cli::parse_sizes;
    CHECK(parse_sizes("1-4") == std::vector<std::size_t>{1, 2, 3, 4});
    CHECK(parse_sizes("1,2,5") == std::vector<std::size_t>{1, 2, 5});
    CHECK(parse_sizes("1-3,10") == std::vector<std::size_t>{1, 2, 3, 10});
    CHECK_THROWS_AS(parse_sizes("5-1"), ArgumentError);
    CHECK_THROWS_AS(parse_sizes("x"), ArgumentError);
    CHECK_THROWS_AS(parse_sizes(""), ArgumentError);
  }

  TEST_CASE("ingest three scenes") {
    memograph::testing::TempDir dir;
    const std::string memo = (dir.path() / "m.jsonl").string();
    const Run r = invoke({"--memo", memo, "ingest", fx("scene_take_cup.json"), fx("scene_tea.json"),
                       fx("scene_no_instruction.json"), "--skill", "receive_object", "--param",
                       "object=cup", "--notes", "fine"});
    CHECK(r.code == 0);
    CHECK(r.out == "1\n2\n3\n");
    const auto store = MemoGraphStore::load(memo);
    CHECK(store.count() == 3);
    CHECK(store.get(2).outcome.notes == "fine");
    CHECK(invoke({"--memo", memo, "ingest", fx("scene_tea.json"), "--skill", "refill_tea", "--param",
               "target=mug"})
              .out == "4\n");
  }

  TEST_CASE("ingest is all or nothing") {
    memograph::testing::TempDir dir;
    const auto memo = dir.path() / "m.jsonl";
    invoke({"--memo", memo.string(), "ingest", fx("scene_tea.json"), "--skill", "refill_tea",
         "--param", "target=mug"});
    const std::string before = file_bytes(memo);
    const Run bad = invoke({"--memo", memo.string(), "ingest", fx("scene_take_cup.json"),
                         fx("scene_bad.json"), "--skill", "receive_object", "--param",
                         "object=cup"});
    CHECK(bad.code == memograph::cli::kIoError);
    CHECK(bad.err.find("scene_bad.json") != std::string::npos);
    const Run missing = invoke({"--memo", memo.string(), "ingest", fx("scene_take_cup.json"),
                             fx("nope.json"), "--skill", "receive_object", "--param",
                             "object=cup"});
    CHECK(missing.code == memograph::cli::kIoError);
    CHECK(file_bytes(memo) == before);
  }

  TEST_CASE("ingest argument errors") {
    memograph::testing::TempDir dir;
    const std::string memo = (dir.path() / "m.jsonl").string();
    CHECK(invoke({"--memo", memo, "ingest", fx("scene_tea.json"), "--skill", "juggle"}).code ==
          memograph::cli::kArgumentError);
    CHECK(invoke({"--memo", memo, "ingest", fx("scene_tea.json"), "--skill", "refill_tea"}).code ==
          memograph::cli::kArgumentError);
    CHECK(invoke({"--memo", memo, "ingest", fx("scene_tea.json"), "--skill", "refill_tea", "--param",
               "target"})
              .code == memograph::cli::kArgumentError);
    CHECK(invoke({"--memo", memo, "ingest", fx("scene_tea.json"), "--skill", "refill_tea", "--param",
               "target=mug", "--score", "3"})
              .code == memograph::cli::kArgumentError);
    CHECK(invoke({"ingest", fx("scene_tea.json"), "--skill", "refill_tea"}).code ==
          memograph::cli::kArgumentError);
    CHECK(invoke({"frobnicate"}).code == memograph::cli::kArgumentError);
    CHECK_FALSE(std::filesystem::exists(memo));
  }

  TEST_CASE("ingest with operator adjudication") {
    memograph::testing::TempDir dir;
    const std::string memo = (dir.path() / "m.jsonl").string();
    const Run r = invoke({"--memo", memo, "ingest", fx("scene_tea.json"), fx("scene_take_cup.json"),
                       "--skill", "refill_tea", "--param", "target=mug", "--adjudicate"},
                      "failure 0.1 spilled\npartial 0.5\n");
    REQUIRE(r.code == 0);
    CHECK(r.out == "1\n2\n");
    const auto store = MemoGraphStore::load(memo);
    CHECK(store.get(1).outcome.status == OutcomeStatus::kFailure);
    CHECK(store.get(1).outcome.notes == "spilled");
    CHECK(store.get(2).outcome.status == OutcomeStatus::kPartial);

    const Run eof = invoke({"--memo", memo, "ingest", fx("scene_tea.json"), "--skill", "refill_tea",
                         "--param", "target=mug", "--adjudicate"});
    CHECK(eof.code == memograph::cli::kArgumentError);
    CHECK(MemoGraphStore::load(memo).count() == 2);
  }

  TEST_CASE("match") {
    memograph::testing::TempDir dir;
    const std::string memo = (dir.path() / "m.jsonl").string();
    SUBCASE("missing memory file") {
      const Run r = invoke({"--memo", memo, "match", fx("scene_tea.json")});
      CHECK(r.code == memograph::cli::kIoError);
      CHECK(r.err.find("not found") != std::string::npos);
    }
    SUBCASE("empty memory") {
      std::ofstream(memo).close();
      const Run r = invoke({"--memo", memo, "match", fx("scene_tea.json")});
      CHECK(r.code == 0);
      CHECK(nlohmann::json::parse(r.out)["results"].empty());
    }
    SUBCASE("identity is ranked first with score 1") {
      invoke({"--memo", memo, "ingest", fx("scene_take_cup.json"), "--skill", "receive_object",
           "--param", "object=cup"});
      invoke({"--memo", memo, "ingest", fx("scene_tea.json"), "--skill", "refill_tea", "--param",
           "target=mug"});
      const Run r = invoke({"--memo", memo, "match", fx("scene_tea.json")});
      REQUIRE(r.code == 0);
      const auto doc = nlohmann::json::parse(r.out);
      CHECK(doc["results"][0]["episode_id"] == 2);
      CHECK(doc["results"][0]["s_w"] == 1.0);
      CHECK(doc["results"].size() == 2);
      const Run top1 = invoke({"--memo", memo, "match", fx("scene_tea.json"), "--top-k", "1"});
      CHECK(nlohmann::json::parse(top1.out)["results"].size() == 1);
    }
    SUBCASE("weights must sum to one") {
      std::ofstream(memo).close();
      CHECK(invoke({"--memo", memo, "match", fx("scene_tea.json"), "--weights", "0.5,0.5,0.5"}).code ==
            memograph::cli::kArgumentError);
      CHECK(invoke({"--memo", memo, "match", fx("scene_tea.json"), "--weights", "0.5,0.5"}).code ==
            memograph::cli::kArgumentError);
      CHECK(invoke({"--memo", memo, "match", fx("scene_tea.json"), "--tau", "2"}).code ==
            memograph::cli::kArgumentError);
    }
  }

  TEST_CASE("infer") {
    memograph::testing::TempDir dir;
    const std::string memo = (dir.path() / "m.jsonl").string();
    invoke({"--memo", memo, "ingest", fx("scene_tea.json"), "--skill", "refill_tea", "--param",
         "target=mug", "--param", "source=pot"});

    const Run act = invoke({"--memo", memo, "infer", fx("scene_tea.json")});
    CHECK(act.code == 0);
    const auto doc = nlohmann::json::parse(act.out);
    CHECK(doc["verdict"] == "act");
    CHECK(doc["chosen"]["skill_id"] == "refill_tea");

    // Another instruction over the same scene: below 1, so theta 1 abstains.
    const Run strict = invoke({"--memo", memo, "infer", fx("scene_tea.json"), "--theta", "1",
                            "--instruction", "pour me some more tea"});
    CHECK(strict.code == memograph::cli::kNoConfidentMatch);
    CHECK(nlohmann::json::parse(strict.out)["verdict"] == "no_confident_match");

    // Intuitive query on instructed memory: gamma's mass moves to nodes and links.
    const Run intuitive = invoke({"--memo", memo, "infer", fx("scene_tea.json"), "--mode", "intuitive"});
    CHECK(intuitive.code == 0);
    const auto m = nlohmann::json::parse(intuitive.out)["chosen"]["match"];
    CHECK(m["s_w"] == 1.0);

    CHECK(invoke({"--memo", memo, "infer", fx("scene_no_instruction.json"), "--mode", "instruction"})
              .code == memograph::cli::kArgumentError);
    CHECK(invoke({"--memo", memo, "infer", fx("scene_tea.json"), "--mode", "psychic"}).code ==
          memograph::cli::kArgumentError);
    CHECK(invoke({"--memo", memo, "--encoder", "remote", "infer", fx("scene_tea.json")}).code ==
          memograph::cli::kArgumentError);
  }

  TEST_CASE("remote encoder errors map to exit 5") {
    memograph::testing::TempDir dir;
    const std::string memo = (dir.path() / "m.jsonl").string();
    invoke({"--memo", memo, "ingest", fx("scene_tea.json"), "--skill", "refill_tea", "--param",
         "target=mug"});
    setenv("MEMOGRAPH_ENCODER_URL", "http://encoder.invalid/embed", 1);
    const Run r = invoke({"--memo", memo, "--encoder", "remote", "match", fx("scene_tea.json")});
    unsetenv("MEMOGRAPH_ENCODER_URL");
    CHECK(r.code == memograph::cli::kRemoteError);
  }

  TEST_CASE("stats") {
    memograph::testing::TempDir dir;
    const std::string memo = (dir.path() / "m.jsonl").string();
    invoke({"--memo", memo, "ingest", fx("scene_tea.json"), fx("scene_tea.json"), "--skill",
         "refill_tea", "--param", "target=mug"});
    invoke({"--memo", memo, "ingest", fx("scene_tea.json"), "--skill", "refill_tea", "--param",
         "target=mug", "--outcome", "failure", "--score", "0"});
    const Run r = invoke({"--memo", memo, "stats"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["episodes"] == 3);
    CHECK(doc["skills"]["refill_tea"]["successes"] == 2);
  }

  TEST_CASE("experiment") {
    memograph::testing::TempDir dir;
    const std::vector<std::string> args{"experiment", "--sizes", "1,2", "--trials", "3",
                                        "--seed", "5", "--threads", "1"};
    const Run a = invoke(args);
    const Run b = invoke(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 1 + 4 * 2 * 2);

    const auto csv = dir.path() / "r.csv";
    const auto report = dir.path() / "r.json";
    auto to_files = args;
    to_files.insert(to_files.end(), {"--csv", csv.string(), "--report", report.string()});
    const Run c = invoke(to_files);
    CHECK(c.code == 0);
    CHECK(c.out.empty());
    CHECK(file_bytes(csv) == a.out);
    CHECK(nlohmann::json::parse(file_bytes(report))["cells"].size() == 16);

    CHECK(invoke({"experiment", "--sizes", "0"}).code == memograph::cli::kArgumentError);
    CHECK(invoke({"experiment", "--modes", "dreaming"}).code == memograph::cli::kArgumentError);
    CHECK(invoke({"experiment", "--families", fx("nope.json")}).code == memograph::cli::kIoError);
  }
}
