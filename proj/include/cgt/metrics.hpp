#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cgt/tracker.hpp"

namespace cgt {

/// Sørensen-Dice coefficient 2|a∩b| / (|a|+|b|); two empty sets score 1.
double dsc(const std::set<std::string>& a, const std::set<std::string>& b);

struct BankScores {
  double qbank = 1.0;
  double ebank = 1.0;
  double fbank = 1.0;
  double f_union_e = 1.0;

  bool operator==(const BankScores&) const = default;
};

BankScores compare_banks(const Banks& pred, const Banks& gold);

struct Snapshot {
  std::string utterance_id;
  Banks banks;

  bool operator==(const Snapshot&) const = default;
};

struct Trajectory {
  std::string group_id;
  std::vector<Snapshot> snapshots;
};

struct TrajectoryEval {
  std::vector<BankScores> per_utterance;
  BankScores mean;
};

/// Pointwise comparison plus means. Throws Errc::length_mismatch or
/// Errc::id_mismatch when the trajectories do not line up, and
/// Errc::empty_input when they are empty.
TrajectoryEval trajectory_eval(const Trajectory& pred, const Trajectory& gold);

/// Extends a trajectory to `length` snapshots by repeating its final banks.
Trajectory pad_trajectory(const Trajectory& t, std::size_t length);

struct DscReport {
  /// Per-group means over the group's own (unpadded) length.
  std::map<std::string, BankScores> per_group;
  /// Index-wise mean across groups, shorter groups padded with their final
  /// banks.
  std::vector<BankScores> series;
};

DscReport aggregate_groups(const std::vector<std::pair<Trajectory, Trajectory>>& pairs);

enum class ReportFormat { markdown, csv_series, structured };

void render_report(std::ostream& out, const DscReport& report, ReportFormat format);
/// Reads back the structured rendering.
DscReport load_report(std::istream& in);

}  // namespace cgt
