#include "doctest.h"

#include <sstream>

#include "cgt/error.hpp"
#include "cgt/metrics.hpp"
#include "oracles.hpp"

using namespace cgt;
using Set = std::set<std::string>;

namespace {

Trajectory constant_trajectory(const std::string& group, std::size_t length, const Banks& banks) {
  Trajectory t{group, {}};
  for (std::size_t i = 0; i < length; ++i) t.snapshots.push_back({"u" + std::to_string(i), banks});
  return t;
}

}  // namespace

TEST_CASE("dice coefficient values") {
  CHECK(dsc({"x", "y"}, {"x", "y"}) == 1.0);
  CHECK(dsc({"x"}, {"y"}) == 0.0);
  CHECK(dsc({"x", "y", "z"}, {"x", "y", "w"}) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(dsc({}, {}) == 1.0);
  CHECK(dsc({"x"}, {}) == 0.0);
}

TEST_CASE("dice coefficient algebra") {
  oracle::Rng rng(41);
  for (int i = 0; i < 2000; ++i) {
    auto a = oracle::random_string_set(rng, 12, 8);
    auto b = oracle::random_string_set(rng, 12, 8);
    const double ab = dsc(a, b);
    CHECK(ab == dsc(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(dsc(a, a) == 1.0);
    a.insert("shared");
    b.insert("shared");
    CHECK(dsc(a, b) >= ab);
  }
}

TEST_CASE("bank comparison") {
  const Banks gold{{"q?"}, {}, {"a", "b"}};
  CHECK(compare_banks(gold, gold) == BankScores{1.0, 1.0, 1.0, 1.0});
  const Banks demoted{{"q?"}, {"a", "b"}, {}};
  const auto s = compare_banks(demoted, gold);
  CHECK(s.f_union_e == 1.0);
  CHECK(s.fbank < 1.0);
  CHECK(s.ebank == 0.0);
  CHECK(compare_banks(Banks{{"q?"}, {}, {"a"}}, Banks{{"q?"}, {}, {"a"}}).ebank == 1.0);
}

TEST_CASE("trajectory evaluation") {
  const Banks b{{"q?"}, {"e"}, {"f"}};
  const auto t = constant_trajectory("g", 3, b);
  const auto same = trajectory_eval(t, t);
  CHECK(same.per_utterance.size() == 3);
  CHECK(same.mean == BankScores{1.0, 1.0, 1.0, 1.0});

  const auto one = constant_trajectory("g", 1, Banks{{"q?"}, {"x"}, {"f"}});
  const auto gold1 = constant_trajectory("g", 1, b);
  CHECK(trajectory_eval(one, gold1).mean == compare_banks(one.snapshots[0].banks, b));

  auto renamed = t;
  renamed.snapshots[1].utterance_id = "other";
  CHECK_THROWS_WITH_AS(trajectory_eval(renamed, t), doctest::Contains("other"), Error);
  CHECK_THROWS_AS(trajectory_eval(constant_trajectory("g", 2, b), t), Error);
  CHECK_THROWS_AS(trajectory_eval(Trajectory{"g", {}}, Trajectory{"g", {}}), Error);
}

TEST_CASE("cross-group padding") {
  const Banks gold{{}, {}, {"a", "b"}};
  const Banks half{{}, {}, {"a", "c"}};
  auto short_pred = constant_trajectory("s", 3, gold);
  short_pred.snapshots.back().banks = half;
  const auto short_gold = constant_trajectory("s", 3, gold);
  const auto long_t = constant_trajectory("l", 5, gold);

  const auto report = aggregate_groups({{short_pred, short_gold}, {long_t, long_t}});
  REQUIRE(report.series.size() == 5);
  // Short group: 1, 1, 0.5 then padded with 0.5; long group is perfect.
  const double expected[] = {1.0, 1.0, 0.75, 0.75, 0.75};
  for (std::size_t i = 0; i < 5; ++i) CHECK(report.series[i].fbank == doctest::Approx(expected[i]));
  CHECK(report.per_group.at("s").fbank == doctest::Approx(2.5 / 3.0));
  CHECK(report.per_group.at("l").fbank == 1.0);

  const auto single = aggregate_groups({{short_pred, short_gold}});
  const auto own = trajectory_eval(short_pred, short_gold);
  REQUIRE(single.series.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(single.series[i] == own.per_utterance[i]);

  CHECK_THROWS_AS(aggregate_groups({}), Error);
}

TEST_CASE("padding leaves per-group means alone") {
  oracle::Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<Trajectory, Trajectory>> pairs;
    std::vector<BankScores> own;
    for (int g = 0; g < 3; ++g) {
      const std::size_t n = 1 + oracle::uniform(rng, 6);
      Trajectory p{"g" + std::to_string(g), {}}, q{"g" + std::to_string(g), {}};
      for (std::size_t i = 0; i < n; ++i) {
        auto random_banks = [&] {
          return Banks{oracle::random_string_set(rng, 5, 3), oracle::random_string_set(rng, 5, 3),
                       oracle::random_string_set(rng, 5, 3)};
        };
        p.snapshots.push_back({"u" + std::to_string(i), random_banks()});
        q.snapshots.push_back({"u" + std::to_string(i), random_banks()});
      }
      own.push_back(trajectory_eval(p, q).mean);
      pairs.emplace_back(p, q);
    }
    const auto report = aggregate_groups(pairs);
    for (int g = 0; g < 3; ++g) CHECK(report.per_group.at("g" + std::to_string(g)) == own[g]);
    for (const auto& s : report.series) {
      for (double v : {s.qbank, s.ebank, s.fbank, s.f_union_e}) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
    // Identical trajectories aggregate to a flat series at 1.
    std::vector<std::pair<Trajectory, Trajectory>> same;
    for (const auto& [p, q] : pairs) same.emplace_back(q, q);
    for (const auto& s : aggregate_groups(same).series) CHECK(s == BankScores{1.0, 1.0, 1.0, 1.0});
  }
}

TEST_CASE("report rendering") {
  const Banks b{{"q?"}, {"e"}, {"f"}};
  const auto t = constant_trajectory("g1", 2, b);
  const auto report = aggregate_groups({{t, t}});

  std::ostringstream md;
  render_report(md, report, ReportFormat::markdown);
  CHECK(md.str() ==
        "| Bank | g1 |\n|---|---|\n| QBank | 1.000 |\n| EBank | 1.000 |\n| FBank | 1.000 |\n"
        "| F ∪ E | 1.000 |\n");

  std::ostringstream csv;
  render_report(csv, report, ReportFormat::csv_series);
  CHECK(csv.str().rfind("index,bank,dsc\n1,qbank,", 0) == 0);

  std::ostringstream js;
  render_report(js, report, ReportFormat::structured);
  std::istringstream in(js.str());
  const auto back = load_report(in);
  CHECK(back.per_group == report.per_group);
  CHECK(back.series == report.series);

  std::istringstream bad("{}");
  CHECK_THROWS_AS(load_report(bad), Error);
}
