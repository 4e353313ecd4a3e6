#include "doctest.h"

#include <fstream>
#include <map>
#include <sstream>

#include "cgt/commands.hpp"
#include "cgt/config.hpp"
#include "cgt/error.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace cgt;

namespace {

EnvLookup env_of(std::map<std::string, std::string> values) {
  return [values = std::move(values)](const std::string& name) -> std::optional<std::string> {
    auto it = values.find(name);
    if (it == values.end()) return std::nullopt;
    return it->second;
  };
}

const EnvLookup kNoEnv = env_of({});

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run track(const TaskConfig& config, const std::string& log_text,
          ExtractorKind kind = ExtractorKind::dictionary) {
  std::istringstream in(log_text);
  std::ostringstream out, err;
  const int status = cmd_track(config, {in, "log"}, kind, LabelSource::gold, {out, err});
  return {status, out.str(), err.str()};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config defaults, file, and environment") {
  const auto d = load_config(std::nullopt, kNoEnv);
  CHECK(d.blocks.size() == 5);
  CHECK(d.seed_facts == std::vector<std::string>{"red = 10"});
  CHECK(d.relational_facts);
  CHECK(d.similarity_threshold == 0.2);

  const auto small = load_config(oracle::data_path("small_2x3.json"), kNoEnv);
  CHECK(small.blocks == std::vector<std::string>{"red", "blue"});
  CHECK(small.seed_facts.empty());

  const auto shipped = load_config(oracle::data_path("../../data/config.json"), kNoEnv);
  REQUIRE(shipped.stopword_path);
  CHECK(std::ifstream(*shipped.stopword_path).good());

  const auto env = load_config(std::nullopt, env_of({{"CGT_BLOCKS", "a, b"},
                                                     {"CGT_WEIGHTS", "1,2,3"},
                                                     {"CGT_SEED_FACTS", "a = 1; b = 2"},
                                                     {"CGT_RELATIONAL_FACTS", "false"},
                                                     {"CGT_SIMILARITY_THRESHOLD", "-1"}}));
  CHECK(env.blocks == std::vector<std::string>{"a", "b"});
  CHECK(env.weight_domain == std::vector<int>{1, 2, 3});
  CHECK(env.seed_facts.size() == 2);
  CHECK_FALSE(env.relational_facts);
  CHECK(env.similarity_threshold == -1.0);

  auto code = [](const std::function<void()>& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::io;
  };
  CHECK(code([] { load_config(std::nullopt, env_of({{"CGT_WEIGHTS", "1,x"}})); }) ==
        Errc::invalid_config);
  CHECK(code([] { load_config(std::nullopt, env_of({{"CGT_SEED_FACTS", "red < blue"}})); }) ==
        Errc::invalid_config);
  std::istringstream unknown(R"({"colour": 1})");
  CHECK(code([&] { parse_config(unknown); }) == Errc::invalid_config);
  std::istringstream wrong(R"({"blocks": "red"})");
  CHECK(code([&] { parse_config(wrong); }) == Errc::invalid_config);
}

TEST_CASE("track writes one snapshot per move") {
  const auto config = load_config(std::nullopt, kNoEnv);
  const auto run = track(config, read_file(oracle::data_path("golden_dialogue.jsonl")));
  CHECK(run.status == 0);
  std::istringstream lines(run.out);
  std::string line;
  std::vector<nlohmann::json> records;
  while (std::getline(lines, line)) records.push_back(nlohmann::json::parse(line));
  REQUIRE(records.size() == 4);
  CHECK(records[0]["utterance_id"] == "u1");
  CHECK(records[3]["status"] == "passed-through");
  CHECK(records[1]["fbank"].get<std::set<std::string>>() ==
        std::set<std::string>{"blue = 10", "red = 10", "red = blue"});

  const auto empty = track(config, "");
  CHECK(empty.status == 0);
  CHECK(empty.out.empty());
}

TEST_CASE("track reports bad input") {
  const auto config = load_config(std::nullopt, kNoEnv);
  const auto unknown =
      track(config, R"({"utterance_id": "u5", "label": "STATEMENT", "prop_text": "orange = 10"})");
  CHECK(unknown.status == 2);
  CHECK(unknown.err.find("u5") != std::string::npos);

  const auto malformed = track(config, "{\"utterance_id\": \"u1\"}\n{\"label\": \"STATEMENT\"}\n");
  CHECK(malformed.status == 2);
  CHECK(malformed.err.find("log:2") != std::string::npos);

  const auto skipped = track(config, R"({"utterance_id": "u1", "label": "ACCEPT"})");
  CHECK(skipped.status == 1);
  CHECK(skipped.err.find("1 move(s) skipped") != std::string::npos);

  const auto rejected = track(config, R"({"utterance_id": "u1", "label": "ACCEPT", "prop_text": "red = 20"})");
  CHECK(rejected.status == 1);
  CHECK(rejected.err.find("InconsistentState") != std::string::npos);

  auto no_catalog = config;
  no_catalog.catalog_path.reset();
  CHECK(track(no_catalog, "", ExtractorKind::similarity).status == 2);
}

TEST_CASE("similarity extractor through the config") {
  auto config = load_config(std::nullopt, kNoEnv);
  config.catalog_path = oracle::data_path("catalog.jsonl");
  const auto run = track(
      config, R"({"utterance_id": "u1", "label": "STATEMENT", "text": "red block's ten so then"})",
      ExtractorKind::similarity);
  CHECK(run.status == 0);
  CHECK(nlohmann::json::parse(run.out)["status"] == "applied");
}

TEST_CASE("eval on matching and mismatched logs") {
  const auto config = load_config(std::nullopt, kNoEnv);
  const auto log = read_file(oracle::data_path("synthetic_b.jsonl"));
  std::istringstream pred(log), gold(log);
  std::ostringstream out, err;
  CHECK(cmd_eval(config, {pred, "pred"}, {gold, "gold"}, ExtractorKind::dictionary,
                 LabelSource::gold, ReportFormat::structured, {out, err}) == 0);
  std::istringstream report_text(out.str());
  const auto report = load_report(report_text);
  CHECK(report.per_group.size() == 3);
  for (const auto& [g, s] : report.per_group) CHECK(s == BankScores{1.0, 1.0, 1.0, 1.0});

  std::istringstream other(read_file(oracle::data_path("synthetic_c.jsonl"))), gold2(log);
  std::ostringstream out2, err2;
  CHECK(cmd_eval(config, {other, "pred"}, {gold2, "gold"}, ExtractorKind::dictionary,
                 LabelSource::gold, ReportFormat::markdown, {out2, err2}) == 2);
  CHECK(err2.str().find("groups do not match") != std::string::npos);
}

TEST_CASE("oracle check") {
  auto config = load_config(oracle::data_path("small_2x3.json"), kNoEnv);
  std::ostringstream a, b, err;
  CHECK(cmd_oracle_check(config, 200, 5, {a, err}) == 0);
  CHECK(cmd_oracle_check(config, 200, 5, {b, err}) == 0);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("failed: 0") != std::string::npos);

  std::ostringstream vacuous;
  CHECK(cmd_oracle_check(config, 0, 1, {vacuous, err}) == 0);
  CHECK(vacuous.str().find("trials: 0") != std::string::npos);

  auto big = load_config(std::nullopt, env_of({{"CGT_BLOCKS", "a,b,c,d,e,f"}, {"CGT_SEED_FACTS", ""}}));
  std::ostringstream guard, guard_err;
  CHECK(cmd_oracle_check(big, 1, 1, {guard, guard_err}) == 2);
}

TEST_CASE("repl session") {
  Repl repl(load_config(std::nullopt, kNoEnv).setup());
  const auto initial = repl.banks();

  auto out = repl.execute("statement red = blue");
  CHECK(out.find("+ EBank: red = blue") != std::string::npos);
  CHECK(repl.execute("banks").find("  red = blue") != std::string::npos);

  out = repl.execute("accept red = blue");
  CHECK(out.find("+ FBank: blue = 10") != std::string::npos);

  CHECK(repl.execute("accept orange = 1").rfind("error:", 0) == 0);
  CHECK(repl.state().history.size() == 2);

  repl.execute("undo");
  repl.execute("undo");
  CHECK(repl.banks() == initial);
  CHECK(repl.execute("undo") == "nothing to undo\n");

  repl.execute("doubt red = 10");
  repl.execute("undo");
  CHECK(repl.banks() == initial);

  CHECK(repl.execute("frobnicate").rfind("error:", 0) == 0);
  repl.execute("quit");
  CHECK(repl.finished());
}

TEST_CASE("undo after any move restores the banks") {
  oracle::Rng rng(51);
  const auto setup = load_config(std::nullopt, kNoEnv).setup();
  const auto catalog = generate_catalog(setup.domain, 1);
  Repl repl(setup);
  const char* verbs[] = {"statement ", "accept ", "doubt "};
  for (int i = 0; i < 200; ++i) {
    const auto before = repl.banks();
    const auto text = format_prop(setup.domain, catalog[oracle::uniform(rng, catalog.size())]);
    const auto history = repl.state().history.size();
    repl.execute(verbs[oracle::uniform(rng, 3)] + text);
    if (repl.state().history.size() > history) {
      repl.execute("undo");
      CHECK(repl.banks() == before);
      repl.execute(verbs[oracle::uniform(rng, 2)] + text);
    }
  }
}
