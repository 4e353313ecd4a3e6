#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cgt/epistemic.hpp"
#include "cgt/move.hpp"
#include "cgt/proposition.hpp"

namespace cgt {

/// What the group knows about one block's weight.
///   evidence_for, evidence_against ⊆ possibilities; possibilities never empty.
/// The two evidence sets may overlap (conflicting evidence).
struct BlockKnowledge {
  WeightSet possibilities;
  WeightSet evidence_for;
  WeightSet evidence_against;

  bool resolved() const noexcept { return possibilities.size() == 1; }
  bool operator==(const BlockKnowledge&) const = default;
};

/// Relational (block-block and block-sum) atoms. Accepted atoms are never
/// also evidenced; derived atoms are those entailed by the accepted ones and
/// not accepted themselves.
struct RelationalStore {
  std::set<AtomicProp> evidenced;
  std::set<AtomicProp> accepted;
  std::set<AtomicProp> derived;

  bool established(const AtomicProp& atom) const {
    return accepted.count(atom) > 0 || derived.count(atom) > 0;
  }
  bool operator==(const RelationalStore&) const = default;
};

/// Task configuration the tracker and its kernel mirror start from.
struct TaskSetup {
  TaskDomain domain = TaskDomain::weights_task();
  /// Weight equalities known to the group before the dialogue starts.
  std::vector<AtomicProp> seed_facts;
  /// Report accepted and derived relational atoms in the fact bank.
  bool relational_facts = true;
};

struct CGState {
  std::shared_ptr<const TaskDomain> domain;
  bool relational_facts = true;
  std::vector<BlockKnowledge> per_block;
  RelationalStore relations;
  std::vector<Move> history;

  const BlockKnowledge& block(BlockId id) const { return per_block.at(id.index); }
  PossibilityMap possibilities() const;
  /// Equality of everything except the move history.
  bool same_knowledge(const CGState& other) const {
    return per_block == other.per_block && relations == other.relations;
  }
};

struct Banks {
  std::set<std::string> qbank;
  std::set<std::string> ebank;
  std::set<std::string> fbank;

  bool operator==(const Banks&) const = default;
};

/// Throws Errc::invalid_seed for non-equality or conflicting seeds.
CGState init_cgs(const TaskSetup& setup);

/// Knowledge measure used to pick the block an atom updates: (eliminated
/// possibilities, evidence count), compared lexicographically.
std::pair<std::size_t, std::size_t> knowledge_of(const CGState& s, BlockId block);

/// The atom's lhs, unless the rhs is a single block about which less is known.
BlockId select_target(const AtomicProp& atom, const CGState& s);

using Notes = std::vector<std::string>;

/// Adds evidence for/against weights; possibilities are left untouched.
/// Weights already eliminated are dropped (and noted) instead of stored.
CGState apply_statement(const CGState& s, const PropFormula& p, Notes* notes = nullptr);

/// Prunes inconsistent weights and records relational atoms as accepted,
/// then propagates. Throws Errc::inconsistent_state if a block would be
/// left without possibilities.
CGState apply_accept(const CGState& s, const PropFormula& p, Notes* notes = nullptr);

/// Arc-consistency pruning over accepted/derived atoms plus derivation of
/// entailed relations (equality substitution, transitivity), to fixpoint.
CGState propagate(const CGState& s, Notes* notes = nullptr);

Banks generate_banks(const CGState& s);

enum class MoveStatus { applied, passed_through, skipped, rejected };

std::string_view status_name(MoveStatus status) noexcept;

struct MoveOutcome {
  CGState state;
  Banks banks;
  MoveStatus status = MoveStatus::applied;
  Notes notes;
};

/// STATEMENT and ACCEPT update the state; every other label only lands in
/// the history. Unresolved STATEMENT/ACCEPT moves are skipped and
/// inconsistent ACCEPTs rejected, leaving the state unchanged.
MoveOutcome apply_move(const CGState& s, const Move& m);

/// Replays seeds and moves on the evidence model: seeds and ACCEPTs are
/// announced, each STATEMENT atom becomes a piece of evidence (atoms that
/// hold in no remaining world are skipped). ContradictoryModel propagates.
EpistemicModel mirror_to_kernel(const TaskSetup& setup, std::span<const Move> moves,
                                std::size_t max_worlds = kDefaultMaxWorlds);

}  // namespace cgt
