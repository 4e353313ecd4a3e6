#include "cgt/commands.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <boost/algorithm/string.hpp>

#include "cgt/epistemic.hpp"
#include "cgt/error.hpp"
#include "json.hpp"

namespace cgt {

namespace {

std::ifstream open_resource(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, std::string("cannot open ") + what + " '" + path + "'");
  return in;
}

std::set<std::string> configured_stopwords(const TaskConfig& config) {
  if (!config.stopword_path) return default_stopwords();
  auto in = open_resource(*config.stopword_path, "stop-word file");
  return load_stopwords(in);
}

}  // namespace

std::shared_ptr<const PropositionExtractor> make_extractor(const TaskConfig& config,
                                                           ExtractorKind kind) {
  const TaskDomain domain = config.domain();

  auto dictionary = [&]() -> std::shared_ptr<const PropositionExtractor> {
    PropositionDictionary d;
    if (config.dictionary_path) {
      auto in = open_resource(*config.dictionary_path, "dictionary");
      d = load_dictionary(in, domain);
    }
    return std::make_shared<DictionaryExtractor>(std::move(d), domain);
  };
  auto similarity = [&]() -> std::shared_ptr<const PropositionExtractor> {
    if (!config.catalog_path) {
      throw Error(Errc::invalid_config, "the similarity extractor needs catalog_path");
    }
    auto in = open_resource(*config.catalog_path, "catalog");
    auto index = std::make_shared<const SimilarityIndex>(load_catalog(in, domain),
                                                         configured_stopwords(config), domain);
    return std::make_shared<SimilarityExtractor>(std::move(index), config.similarity_threshold);
  };

  switch (kind) {
    case ExtractorKind::dictionary:
      return dictionary();
    case ExtractorKind::similarity:
      return similarity();
    case ExtractorKind::dictionary_then_similarity:
      return std::make_shared<ChainExtractor>(
          std::vector<std::shared_ptr<const PropositionExtractor>>{dictionary(), similarity()});
  }
  return dictionary();
}

std::vector<GroupRun> track_groups(const TaskSetup& setup, const std::vector<Move>& moves) {
  std::vector<GroupRun> runs;
  std::map<std::string, std::size_t> index;
  std::vector<CGState> states;
  const CGState initial = init_cgs(setup);

  for (const auto& m : moves) {
    auto [it, fresh] = index.emplace(m.group_id, runs.size());
    if (fresh) {
      runs.push_back({Trajectory{m.group_id, {}}, {}, {}});
      states.push_back(initial);
    }
    auto& run = runs[it->second];
    auto outcome = apply_move(states[it->second], m);
    states[it->second] = std::move(outcome.state);
    run.trajectory.snapshots.push_back({m.utterance_id, std::move(outcome.banks)});
    run.statuses.push_back(outcome.status);
    run.notes.insert(run.notes.end(), outcome.notes.begin(), outcome.notes.end());
  }
  return runs;
}

void write_snapshot(std::ostream& out, const std::string& group_id, const Snapshot& snapshot,
                    MoveStatus status) {
  nlohmann::ordered_json j;
  j["group_id"] = group_id;
  j["utterance_id"] = snapshot.utterance_id;
  j["status"] = status_name(status);
  j["qbank"] = snapshot.banks.qbank;
  j["ebank"] = snapshot.banks.ebank;
  j["fbank"] = snapshot.banks.fbank;
  out << j.dump() << '\n';
}

namespace {

void report_error(std::ostream& err, const std::string& source, const std::exception& e) {
  if (const auto* log = dynamic_cast<const LogError*>(&e)) {
    for (const auto& issue : log->issues()) {
      err << "error: " << source << ':' << issue.line;
      if (!issue.field.empty()) err << ": field '" << issue.field << "'";
      err << ": " << issue.message << '\n';
    }
    return;
  }
  err << "error: " << (source.empty() ? "" : source + ": ") << e.what() << '\n';
}

std::vector<Move> load_and_resolve(LogSource source, const ResolvePolicy& policy,
                                   const TaskDomain& domain) {
  auto moves = load_move_log(source.in);
  for (auto& m : moves) m = resolve(std::move(m), policy, domain);
  return moves;
}

}  // namespace

int cmd_track(const TaskConfig& config, LogSource log, ExtractorKind extractor,
              LabelSource labels, IoStreams io) {
  std::vector<GroupRun> runs;
  try {
    const auto setup = config.setup();
    const ResolvePolicy policy{make_extractor(config, extractor), labels};
    runs = track_groups(setup, load_and_resolve(log, policy, setup.domain));
  } catch (const std::exception& e) {
    report_error(io.err, log.name, e);
    return 2;
  }

  std::size_t skipped = 0;
  std::size_t rejected = 0;
  for (const auto& run : runs) {
    for (std::size_t i = 0; i < run.statuses.size(); ++i) {
      write_snapshot(io.out, run.trajectory.group_id, run.trajectory.snapshots[i],
                     run.statuses[i]);
      skipped += run.statuses[i] == MoveStatus::skipped;
      rejected += run.statuses[i] == MoveStatus::rejected;
    }
    for (const auto& n : run.notes) io.err << "note: [" << run.trajectory.group_id << "] " << n << '\n';
  }
  if (skipped + rejected > 0) {
    io.err << "summary: " << skipped << " move(s) skipped, " << rejected
           << " move(s) rejected\n";
    return 1;
  }
  return 0;
}

DscReport evaluate_logs(const TaskSetup& setup, const std::vector<Move>& pred,
                        const std::vector<Move>& gold) {
  const auto pred_runs = track_groups(setup, pred);
  const auto gold_runs = track_groups(setup, gold);

  std::map<std::string, const Trajectory*> by_group;
  for (const auto& run : pred_runs) by_group[run.trajectory.group_id] = &run.trajectory;

  std::vector<std::pair<Trajectory, Trajectory>> pairs;
  std::vector<std::string> missing;
  for (const auto& run : gold_runs) {
    auto it = by_group.find(run.trajectory.group_id);
    if (it == by_group.end()) {
      missing.push_back("'" + run.trajectory.group_id + "' only in gold");
      continue;
    }
    pairs.emplace_back(*it->second, run.trajectory);
    by_group.erase(it);
  }
  for (const auto& [group, t] : by_group) missing.push_back("'" + group + "' only in prediction");
  if (!missing.empty()) {
    throw Error(Errc::group_mismatch, "groups do not match: " + boost::join(missing, ", "));
  }
  return aggregate_groups(pairs);
}

int cmd_eval(const TaskConfig& config, LogSource pred_log, LogSource gold_log,
             ExtractorKind extractor, LabelSource labels, ReportFormat format, IoStreams io) {
  DscReport report;
  try {
    const auto setup = config.setup();
    const ResolvePolicy policy{make_extractor(config, extractor), labels};
    std::vector<Move> pred;
    std::vector<Move> gold;
    try {
      pred = load_and_resolve(pred_log, policy, setup.domain);
    } catch (const std::exception& e) {
      report_error(io.err, pred_log.name, e);
      return 2;
    }
    try {
      gold = load_and_resolve(gold_log, policy, setup.domain);
    } catch (const std::exception& e) {
      report_error(io.err, gold_log.name, e);
      return 2;
    }
    report = evaluate_logs(setup, pred, gold);
  } catch (const std::exception& e) {
    report_error(io.err, "", e);
    return 2;
  }

  render_report(io.out, report, format);
  if (format == ReportFormat::markdown) {
    io.out << '\n';
    render_report(io.out, report, ReportFormat::csv_series);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Oracle check

std::vector<std::string> oracle_violations(const TaskSetup& setup,
                                           const std::vector<Move>& moves) {
  std::vector<std::string> violations;
  const auto& domain = setup.domain;
  CGState state = init_cgs(setup);
  std::vector<Move> applied;

  for (const auto& m : moves) {
    auto outcome = apply_move(state, m);
    state = std::move(outcome.state);
    if (outcome.status == MoveStatus::applied) applied.push_back(m);

    std::optional<EpistemicModel> model;
    try {
      model = mirror_to_kernel(setup, applied, kOracleMaxWorlds);
    } catch (const Error& e) {
      if (e.code() != Errc::contradictory_model) throw;
      violations.push_back("after '" + m.utterance_id +
                           "': tracker state is consistent but the kernel model is empty");
      return violations;
    }

    for (BlockId b : domain.blocks()) {
      const auto& k = state.block(b);
      auto equality = [&](Weight w) {
        return EpistemicFormula::atom(make_atom(b, Relation::eq, w));
      };
      if (k.resolved()) {
        const Weight w = *k.possibilities.begin();
        if (!holds_A(*model, equality(w))) {
          violations.push_back("after '" + m.utterance_id + "': FBank holds '" + domain.name(b) +
                               " = " + std::to_string(w.grams) + "' but [A] fails");
        }
        continue;
      }
      for (Weight w : k.evidence_for) {
        if (!holds_E(*model, equality(w))) {
          violations.push_back("after '" + m.utterance_id + "': EBank holds '" + domain.name(b) +
                               " = " + std::to_string(w.grams) + "' but [E] fails");
        }
      }
    }
    if (!violations.empty()) return violations;
  }
  return violations;
}

OracleReport run_oracle_check(const TaskSetup& setup, std::size_t trials, std::uint64_t seed,
                              std::size_t max_moves) {
  const WorldUniverse guard(setup.domain, kOracleMaxWorlds);
  (void)guard;
  const auto catalog = generate_catalog(setup.domain, 2);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> length(1, std::max<std::size_t>(1, max_moves));
  std::uniform_int_distribution<std::size_t> pick(0, catalog.size() - 1);
  std::discrete_distribution<int> label_choice({45, 45, 10});
  constexpr MoveLabel kLabels[] = {MoveLabel::statement, MoveLabel::accept, MoveLabel::doubt};

  OracleReport report;
  report.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<Move> moves;
    const std::size_t n = length(rng);
    for (std::size_t i = 0; i < n; ++i) {
      Move m;
      m.group_id = "trial-" + std::to_string(t + 1);
      m.utterance_id = "m" + std::to_string(i + 1);
      m.start_s = m.end_s = static_cast<double>(i);
      m.participant = "oracle";
      m.label = kLabels[label_choice(rng)];
      m.prop = catalog[pick(rng)];
      m.prop_text = format_prop(setup.domain, *m.prop);
      m.text = *m.prop_text;
      moves.push_back(std::move(m));
    }
    auto violations = oracle_violations(setup, moves);
    if (violations.empty()) {
      ++report.passed;
      continue;
    }
    ++report.failed;
    if (report.counterexample.empty()) {
      report.counterexample = std::move(moves);
      report.violations = std::move(violations);
    }
  }
  return report;
}

int cmd_oracle_check(const TaskConfig& config, std::size_t trials, std::uint64_t seed,
                     IoStreams io) {
  OracleReport report;
  try {
    report = run_oracle_check(config.setup(), trials, seed);
  } catch (const std::exception& e) {
    report_error(io.err, "", e);
    return 2;
  }
  io.out << "trials: " << report.trials << "\npassed: " << report.passed
         << "\nfailed: " << report.failed << '\n';
  if (report.failed == 0) return 0;
  io.out << "first counterexample:\n";
  for (const auto& v : report.violations) io.out << "  " << v << '\n';
  io.out << "replay log:\n";
  write_move_log(io.out, report.counterexample);
  return 1;
}

// ---------------------------------------------------------------------------
// REPL

namespace {

void diff_bank(std::ostringstream& out, const char* name, const std::set<std::string>& before,
               const std::set<std::string>& after) {
  std::vector<std::string> removed;
  std::vector<std::string> added;
  std::set_difference(before.begin(), before.end(), after.begin(), after.end(),
                      std::back_inserter(removed));
  std::set_difference(after.begin(), after.end(), before.begin(), before.end(),
                      std::back_inserter(added));
  for (const auto& s : removed) out << "- " << name << ": " << s << '\n';
  for (const auto& s : added) out << "+ " << name << ": " << s << '\n';
}

}  // namespace

std::string format_bank_diff(const Banks& before, const Banks& after) {
  std::ostringstream out;
  diff_bank(out, "QBank", before.qbank, after.qbank);
  diff_bank(out, "EBank", before.ebank, after.ebank);
  diff_bank(out, "FBank", before.fbank, after.fbank);
  return out.str();
}

std::string format_banks(const Banks& banks) {
  std::ostringstream out;
  auto section = [&](const char* name, const std::set<std::string>& items) {
    out << name << " (" << items.size() << ")\n";
    for (const auto& s : items) out << "  " << s << '\n';
  };
  section("QBank", banks.qbank);
  section("EBank", banks.ebank);
  section("FBank", banks.fbank);
  return out.str();
}

Repl::Repl(TaskSetup setup) : setup_(std::move(setup)), state_(init_cgs(setup_)) {}

std::string Repl::execute(const std::string& line) {
  const auto trimmed = boost::trim_copy(line);
  if (trimmed.empty()) return "";
  const auto space = trimmed.find_first_of(" \t");
  const auto command = boost::to_lower_copy(trimmed.substr(0, space));
  const auto rest = space == std::string::npos ? std::string() : boost::trim_copy(trimmed.substr(space));

  if (command == "statement") return apply(MoveLabel::statement, rest);
  if (command == "accept") return apply(MoveLabel::accept, rest);
  if (command == "doubt") return apply(MoveLabel::doubt, rest);
  if (command == "banks") return format_banks(banks());
  if (command == "undo") return undo();
  if (command == "quit" || command == "exit") {
    finished_ = true;
    return "";
  }
  return "error: unknown command '" + command +
         "' (statement, accept, doubt, banks, undo, quit)\n";
}

std::string Repl::apply(MoveLabel label, const std::string& rest) {
  Move m;
  m.utterance_id = "r" + std::to_string(++counter_);
  m.group_id = "repl";
  m.participant = "user";
  m.text = rest;
  m.label = label;
  if (!rest.empty()) {
    try {
      m.prop = parse_prop(*state_.domain, rest);
      m.prop_text = format_prop(*state_.domain, *m.prop);
    } catch (const Error& e) {
      --counter_;
      return std::string("error: ") + e.what() + '\n';
    }
  }
  const Banks before = banks();
  auto outcome = apply_move(state_, m);
  state_ = std::move(outcome.state);

  std::string out;
  for (const auto& n : outcome.notes) out += "note: " + n + '\n';
  const auto diff = format_bank_diff(before, outcome.banks);
  out += diff.empty() ? "(no change)\n" : diff;
  return out;
}

std::string Repl::undo() {
  if (state_.history.empty()) return "nothing to undo\n";
  const Banks before = banks();
  auto moves = state_.history;
  moves.pop_back();
  CGState replayed = init_cgs(setup_);
  for (const auto& m : moves) replayed = apply_move(replayed, m).state;
  state_ = std::move(replayed);
  const auto diff = format_bank_diff(before, banks());
  return diff.empty() ? "(no change)\n" : diff;
}

int cmd_repl(const TaskConfig& config, std::istream& in, IoStreams io, bool prompt) {
  std::optional<Repl> repl;
  try {
    repl.emplace(config.setup());
  } catch (const std::exception& e) {
    report_error(io.err, "", e);
    return 2;
  }
  std::string line;
  while (!repl->finished()) {
    if (prompt) io.out << "> " << std::flush;
    if (!std::getline(in, line)) break;
    io.out << repl->execute(line) << std::flush;
  }
  return 0;
}

}  // namespace cgt
