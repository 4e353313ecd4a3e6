#include "cgt/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <iterator>

#include "cgt/error.hpp"
#include "json.hpp"

namespace cgt {

double dsc(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t shared = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++shared;
      ++ia;
      ++ib;
    }
  }
  return 2.0 * static_cast<double>(shared) / static_cast<double>(a.size() + b.size());
}

namespace {

std::set<std::string> facts_and_evidence(const Banks& banks) {
  std::set<std::string> out = banks.fbank;
  out.insert(banks.ebank.begin(), banks.ebank.end());
  return out;
}

BankScores& operator+=(BankScores& acc, const BankScores& s) {
  acc.qbank += s.qbank;
  acc.ebank += s.ebank;
  acc.fbank += s.fbank;
  acc.f_union_e += s.f_union_e;
  return acc;
}

BankScores mean_of(const std::vector<BankScores>& scores) {
  BankScores sum{0.0, 0.0, 0.0, 0.0};
  for (const auto& s : scores) sum += s;
  const double n = static_cast<double>(scores.size());
  return {sum.qbank / n, sum.ebank / n, sum.fbank / n, sum.f_union_e / n};
}

}  // namespace

BankScores compare_banks(const Banks& pred, const Banks& gold) {
  return {dsc(pred.qbank, gold.qbank), dsc(pred.ebank, gold.ebank), dsc(pred.fbank, gold.fbank),
          dsc(facts_and_evidence(pred), facts_and_evidence(gold))};
}

TrajectoryEval trajectory_eval(const Trajectory& pred, const Trajectory& gold) {
  if (pred.snapshots.size() != gold.snapshots.size()) {
    throw Error(Errc::length_mismatch,
                "group '" + gold.group_id + "': predicted trajectory has " +
                    std::to_string(pred.snapshots.size()) + " snapshots, gold has " +
                    std::to_string(gold.snapshots.size()));
  }
  if (gold.snapshots.empty()) {
    throw Error(Errc::empty_input, "group '" + gold.group_id + "' has no snapshots");
  }
  TrajectoryEval out;
  for (std::size_t i = 0; i < gold.snapshots.size(); ++i) {
    const auto& p = pred.snapshots[i];
    const auto& g = gold.snapshots[i];
    if (p.utterance_id != g.utterance_id) {
      throw Error(Errc::id_mismatch, "group '" + gold.group_id + "' snapshot " +
                                         std::to_string(i + 1) + ": predicted '" +
                                         p.utterance_id + "' vs gold '" + g.utterance_id + "'");
    }
    out.per_utterance.push_back(compare_banks(p.banks, g.banks));
  }
  out.mean = mean_of(out.per_utterance);
  return out;
}

Trajectory pad_trajectory(const Trajectory& t, std::size_t length) {
  Trajectory out = t;
  if (out.snapshots.empty()) return out;
  while (out.snapshots.size() < length) out.snapshots.push_back(t.snapshots.back());
  return out;
}

DscReport aggregate_groups(const std::vector<std::pair<Trajectory, Trajectory>>& pairs) {
  if (pairs.empty()) throw Error(Errc::empty_input, "no groups to aggregate");
  DscReport report;
  std::size_t longest = 0;
  for (const auto& [pred, gold] : pairs) {
    auto eval = trajectory_eval(pred, gold);
    if (!report.per_group.emplace(gold.group_id, eval.mean).second) {
      throw Error(Errc::group_mismatch, "group '" + gold.group_id + "' appears twice");
    }
    longest = std::max(longest, gold.snapshots.size());
  }

  std::vector<BankScores> sums(longest, BankScores{0.0, 0.0, 0.0, 0.0});
  for (const auto& [pred, gold] : pairs) {
    auto eval = trajectory_eval(pad_trajectory(pred, longest), pad_trajectory(gold, longest));
    for (std::size_t i = 0; i < longest; ++i) sums[i] += eval.per_utterance[i];
  }
  const double n = static_cast<double>(pairs.size());
  for (const auto& s : sums) {
    report.series.push_back({s.qbank / n, s.ebank / n, s.fbank / n, s.f_union_e / n});
  }
  return report;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

constexpr std::pair<const char*, double BankScores::*> kBanks[] = {
    {"QBank", &BankScores::qbank},
    {"EBank", &BankScores::ebank},
    {"FBank", &BankScores::fbank},
    {"F ∪ E", &BankScores::f_union_e},
};

constexpr std::pair<const char*, double BankScores::*> kSeriesBanks[] = {
    {"qbank", &BankScores::qbank},
    {"ebank", &BankScores::ebank},
    {"fbank", &BankScores::fbank},
    {"f_union_e", &BankScores::f_union_e},
};

void render_markdown(std::ostream& out, const DscReport& report) {
  out << "| Bank |";
  for (const auto& [group, scores] : report.per_group) out << ' ' << group << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < report.per_group.size(); ++i) out << "---|";
  out << '\n';
  out << std::fixed << std::setprecision(3);
  for (const auto& [name, member] : kBanks) {
    out << "| " << name << " |";
    for (const auto& [group, scores] : report.per_group) out << ' ' << scores.*member << " |";
    out << '\n';
  }
  out << std::defaultfloat;
}

void render_csv(std::ostream& out, const DscReport& report) {
  out << "index,bank,dsc\n";
  out << std::fixed << std::setprecision(6);
  for (std::size_t i = 0; i < report.series.size(); ++i) {
    for (const auto& [name, member] : kSeriesBanks) {
      out << (i + 1) << ',' << name << ',' << report.series[i].*member << '\n';
    }
  }
  out << std::defaultfloat;
}

nlohmann::json scores_json(const BankScores& s) {
  return {{"qbank", s.qbank}, {"ebank", s.ebank}, {"fbank", s.fbank}, {"f_union_e", s.f_union_e}};
}

BankScores scores_from(const nlohmann::json& j) {
  return {j.at("qbank").get<double>(), j.at("ebank").get<double>(), j.at("fbank").get<double>(),
          j.at("f_union_e").get<double>()};
}

}  // namespace

void render_report(std::ostream& out, const DscReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::markdown:
      render_markdown(out, report);
      return;
    case ReportFormat::csv_series:
      render_csv(out, report);
      return;
    case ReportFormat::structured: {
      nlohmann::json j;
      j["per_group"] = nlohmann::json::object();
      for (const auto& [group, scores] : report.per_group) j["per_group"][group] = scores_json(scores);
      j["series"] = nlohmann::json::array();
      for (std::size_t i = 0; i < report.series.size(); ++i) {
        auto entry = scores_json(report.series[i]);
        entry["index"] = i + 1;
        j["series"].push_back(std::move(entry));
      }
      out << j.dump(2) << '\n';
      return;
    }
  }
}

DscReport load_report(std::istream& in) {
  DscReport report;
  try {
    auto j = nlohmann::json::parse(in);
    for (const auto& [group, scores] : j.at("per_group").items()) {
      report.per_group.emplace(group, scores_from(scores));
    }
    for (const auto& entry : j.at("series")) report.series.push_back(scores_from(entry));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_record, std::string("invalid report: ") + e.what());
  }
  return report;
}

}  // namespace cgt
