#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cgt/config.hpp"
#include "cgt/ingestion.hpp"
#include "cgt/metrics.hpp"
#include "cgt/tracker.hpp"

namespace cgt {

enum class ExtractorKind { dictionary, similarity, dictionary_then_similarity };

/// Builds the extractor chain from the config's resources. Similarity needs
/// catalog_path; a missing dictionary_path means an empty dictionary (prop_text
/// still applies).
std::shared_ptr<const PropositionExtractor> make_extractor(const TaskConfig& config,
                                                           ExtractorKind kind);

struct GroupRun {
  Trajectory trajectory;
  /// One entry per move, aligned with the snapshots.
  std::vector<MoveStatus> statuses;
  Notes notes;
};

/// Runs each group from a fresh state. Moves must already be resolved; they
/// are grouped by group_id in order of first appearance.
std::vector<GroupRun> track_groups(const TaskSetup& setup, const std::vector<Move>& moves);

/// {group_id, utterance_id, status, qbank, ebank, fbank} per line.
void write_snapshot(std::ostream& out, const std::string& group_id, const Snapshot& snapshot,
                    MoveStatus status);

struct IoStreams {
  std::ostream& out;
  std::ostream& err;
};

/// An input stream and the name used for it in error messages.
struct LogSource {
  std::istream& in;
  std::string name;
};

/// Exit codes: 0 success, 1 some moves skipped or rejected (trajectory still
/// written), 2 input or configuration error.
int cmd_track(const TaskConfig& config, LogSource log, ExtractorKind extractor,
              LabelSource labels, IoStreams io);

/// Exit codes: 0 success, 2 input error (including group or length mismatch).
int cmd_eval(const TaskConfig& config, LogSource pred_log, LogSource gold_log,
             ExtractorKind extractor, LabelSource labels, ReportFormat format, IoStreams io);

/// Evaluates two resolved move lists; throws on group, length, or id mismatch.
DscReport evaluate_logs(const TaskSetup& setup, const std::vector<Move>& pred,
                        const std::vector<Move>& gold);

inline constexpr std::size_t kOracleMaxWorlds = 10'000;
inline constexpr std::size_t kOracleMaxMoves = 8;

struct OracleReport {
  std::size_t trials = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  /// First failing sequence and what went wrong.
  std::vector<Move> counterexample;
  std::vector<std::string> violations;
};

/// Checks one move sequence: every FBank weight equality must hold under
/// holds_A and every evidence_for equality in EBank under holds_E, in the
/// kernel model mirroring the moves the tracker applied. Returns the
/// violations found.
std::vector<std::string> oracle_violations(const TaskSetup& setup, const std::vector<Move>& moves);

/// Random sequences of STATEMENT/ACCEPT/DOUBT moves over the catalog of
/// formulas with at most two conjuncts. Throws Errc::too_many_worlds above
/// kOracleMaxWorlds.
OracleReport run_oracle_check(const TaskSetup& setup, std::size_t trials, std::uint64_t seed,
                              std::size_t max_moves = kOracleMaxMoves);

/// Exit codes: 0 all trials pass, 1 violations (counterexample written as a
/// move log), 2 configuration error.
int cmd_oracle_check(const TaskConfig& config, std::size_t trials, std::uint64_t seed,
                     IoStreams io);

/// Line-oriented session over one dialogue.
class Repl {
 public:
  explicit Repl(TaskSetup setup);

  /// Runs one command and returns what to print.
  std::string execute(const std::string& line);
  bool finished() const noexcept { return finished_; }
  const CGState& state() const noexcept { return state_; }
  Banks banks() const { return generate_banks(state_); }

 private:
  std::string apply(MoveLabel label, const std::string& rest);
  std::string undo();

  TaskSetup setup_;
  CGState state_;
  std::size_t counter_ = 0;
  bool finished_ = false;
};

/// Changes between two snapshots, one "+ Bank: item" or "- Bank: item" per line.
std::string format_bank_diff(const Banks& before, const Banks& after);
std::string format_banks(const Banks& banks);

int cmd_repl(const TaskConfig& config, std::istream& in, IoStreams io, bool prompt);

}  // namespace cgt
