#include "doctest.h"

#include <fstream>
#include <sstream>

#include "cgt/error.hpp"
#include "cgt/ingestion.hpp"
#include "oracles.hpp"

using namespace cgt;

namespace {

const TaskDomain kTask = TaskDomain::weights_task();

std::vector<Move> load(const std::string& text) {
  std::istringstream in(text);
  return load_move_log(in);
}

PropositionCatalog table_catalog() {
  std::istringstream in(
      R"({"proposition": "red = 10", "phrasings": ["red block is ten"]})"
      "\n"
      R"({"proposition": "blue = 10", "phrasings": ["blue block is also ten"]})"
      "\n"
      R"({"proposition": "green = 20", "phrasings": ["green is twenty"]})"
      "\n");
  return load_catalog(in, kTask);
}

}  // namespace

TEST_CASE("move log loading") {
  auto moves = load(
      R"({"utterance_id": "u2", "group_id": "g", "start_s": 5, "end_s": 6, "label": "STATEMENT", "prop_text": "red = blue", "extra": 1})"
      "\n\n"
      R"({"utterance_id": "u1", "group_id": "g", "start_s": 1, "end_s": 2, "participant": "P1", "text": "hi"})"
      "\n");
  REQUIRE(moves.size() == 2);
  CHECK(moves[0].utterance_id == "u1");
  CHECK(moves[1].label == MoveLabel::statement);
  CHECK(moves[1].prop_text == "red = blue");
  CHECK_FALSE(moves[0].label);
  CHECK(load("").empty());
}

TEST_CASE("move log validation collects located issues") {
  try {
    load(R"({"utterance_id": "u1", "label": "STMT"})"
         "\n"
         R"({"utterance_id": "u2", "start_s": 3, "end_s": 1})"
         "\n"
         "not json\n");
    FAIL("expected a log error");
  } catch (const LogError& e) {
    CHECK(e.code() == Errc::malformed_record);
    REQUIRE(e.issues().size() == 3);
    CHECK(e.issues()[0].line == 1);
    CHECK(e.issues()[0].field == "label");
    CHECK(e.issues()[1].line == 2);
    CHECK(e.issues()[2].line == 3);
  }
  try {
    load(R"({"utterance_id": "u1", "group_id": "g"})"
         "\n"
         R"({"utterance_id": "u1", "group_id": "g"})"
         "\n"
         R"({"utterance_id": "u1", "group_id": "h"})"
         "\n");
    FAIL("expected a duplicate error");
  } catch (const LogError& e) {
    CHECK(e.code() == Errc::duplicate_utterance_id);
    CHECK(e.issues().size() == 1);
  }
}

TEST_CASE("move log write and reload") {
  const auto moves = load_move_log_file(oracle::data_path("synthetic_a.jsonl"));
  std::ostringstream out;
  write_move_log(out, moves);
  std::istringstream in(out.str());
  const auto again = load_move_log(in);
  REQUIRE(again.size() == moves.size());
  for (std::size_t i = 0; i < moves.size(); ++i) {
    CHECK(again[i].utterance_id == moves[i].utterance_id);
    CHECK(again[i].label == moves[i].label);
    CHECK(again[i].prop_text == moves[i].prop_text);
    CHECK(again[i].text == moves[i].text);
  }
}

TEST_CASE("dictionary extraction") {
  std::istringstream in(R"({"utterance_id": "u1", "proposition": "blue = red"})" "\n");
  const auto dict = load_dictionary(in, kTask);
  Move m;
  m.utterance_id = "u1";
  CHECK(extract_dictionary(m, dict, kTask) == parse_prop(kTask, "red = blue"));
  m.utterance_id = "u2";
  m.prop_text = "blue = 10";
  CHECK(extract_dictionary(m, dict, kTask) == parse_prop(kTask, "blue = 10"));
  m.prop_text.reset();
  CHECK_FALSE(extract_dictionary(m, dict, kTask));

  std::istringstream bad(R"({"utterance_id": "u1", "proposition": "orange = 10"})" "\n");
  CHECK_THROWS_AS(load_dictionary(bad, kTask), Error);
}

TEST_CASE("similarity extraction") {
  const SimilarityIndex index(table_catalog(), default_stopwords(), kTask);
  Move m;
  m.text = "red block's ten so then";
  CHECK(extract_similarity(m, index) == parse_prop(kTask, "red = 10"));

  const auto exact = index.best("green is twenty");
  CHECK(exact.formula == parse_prop(kTask, "green = 20"));
  CHECK(exact.score == doctest::Approx(1.0));

  m.text = "purple scale hands";
  CHECK_FALSE(extract_similarity(m, index));
  CHECK(extract_similarity(m, index, -1.0).has_value());

  const SimilarityIndex empty(PropositionCatalog{}, default_stopwords(), kTask);
  CHECK_THROWS_AS(empty.best("red"), Error);
}

TEST_CASE("similarity ties go to the smaller canonical string") {
  std::istringstream in(
      R"({"proposition": "red = 20", "phrasings": ["same words"]})"
      "\n"
      R"({"proposition": "blue = 20", "phrasings": ["same words"]})"
      "\n");
  const SimilarityIndex index(load_catalog(in, kTask), {}, kTask);
  CHECK(index.best("same words").formula == parse_prop(kTask, "blue = 20"));
}

TEST_CASE("stop-word file") {
  std::ifstream in(oracle::data_path("../../data/stopwords.txt"));
  REQUIRE(in);
  const auto words = load_stopwords(in);
  CHECK(words == default_stopwords());
  std::istringstream text("# comment\n\n  the \nA\n");
  CHECK(load_stopwords(text) == std::set<std::string>{"a", "the"});
}

TEST_CASE("tokenizer") {
  CHECK(tokenize("Red block's TEN, so-then!") ==
        std::vector<std::string>{"red", "block", "s", "ten", "so", "then"});
}

TEST_CASE("keyword label heuristic") {
  Move m;
  m.text = "yeah, I suppose";
  CHECK(classify_move_heuristic(m, kTask, false) == MoveLabel::accept);
  m.text = "wait, let's see";
  CHECK(classify_move_heuristic(m, kTask, false) == MoveLabel::doubt);
  m.text = "blue is ten";
  CHECK(classify_move_heuristic(m, kTask, true) == MoveLabel::statement);
  m.text = "okay let's put them on";
  CHECK(classify_move_heuristic(m, kTask, false) == MoveLabel::observation);
  m.text = "yeah blue is ten";
  CHECK(classify_move_heuristic(m, kTask, true) == MoveLabel::statement);
  m.text = "Wait... let's SEE";
  CHECK(classify_move_heuristic(m, kTask, false) == MoveLabel::doubt);
}

TEST_CASE("resolution") {
  PropositionDictionary dict;
  dict.entries.emplace("u1", parse_prop(kTask, "blue = 10"));
  ResolvePolicy policy{std::make_shared<DictionaryExtractor>(dict, kTask), LabelSource::gold};

  Move gold;
  gold.utterance_id = "u1";
  gold.label = MoveLabel::accept;
  auto r = resolve(gold, policy, kTask);
  CHECK(r.label == MoveLabel::accept);
  CHECK(r.prop == parse_prop(kTask, "blue = 10"));
  CHECK(r.prop_text == "blue = 10");
  CHECK_FALSE(r.unresolved);

  Move unlabeled;
  unlabeled.utterance_id = "u9";
  unlabeled.text = "wait, really?";
  CHECK_FALSE(resolve(unlabeled, policy, kTask).label);
  policy.labels = LabelSource::heuristic;
  CHECK(resolve(unlabeled, policy, kTask).label == MoveLabel::doubt);

  Move bare;
  bare.utterance_id = "u8";
  bare.label = MoveLabel::statement;
  CHECK(resolve(bare, policy, kTask).unresolved);

  Move broken;
  broken.utterance_id = "u7";
  broken.group_id = "g3";
  broken.prop_text = "orange = 10";
  try {
    resolve(broken, policy, kTask);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unknown_block);
    CHECK(std::string(e.what()).find("u7") != std::string::npos);
  }
}

TEST_CASE("extractor chain") {
  const auto index =
      std::make_shared<const SimilarityIndex>(table_catalog(), default_stopwords(), kTask);
  const ChainExtractor chain({std::make_shared<DictionaryExtractor>(PropositionDictionary{}, kTask),
                              std::make_shared<SimilarityExtractor>(index, 0.2)});
  Move m;
  m.utterance_id = "u1";
  m.text = "green is twenty";
  CHECK(chain.extract(m) == parse_prop(kTask, "green = 20"));
  m.prop_text = "red = blue";
  CHECK(chain.extract(m) == parse_prop(kTask, "red = blue"));
}
