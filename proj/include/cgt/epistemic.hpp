#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "cgt/proposition.hpp"

namespace cgt {

/// A set of worlds, as a bitmask over the universe's world indices.
using WorldSet = boost::dynamic_bitset<std::uint64_t>;

inline constexpr std::size_t kDefaultMaxWorlds = 1'000'000;

/// All total weight assignments of a domain, enumerated once. World i
/// encodes its weights in mixed radix, the first block varying fastest.
class WorldUniverse {
 public:
  explicit WorldUniverse(TaskDomain domain, std::size_t max_worlds = kDefaultMaxWorlds);

  const TaskDomain& domain() const noexcept { return domain_; }
  std::size_t size() const noexcept { return worlds_.size(); }
  const Assignment& world(std::size_t index) const { return worlds_.at(index); }

  WorldSet empty_set() const { return WorldSet(worlds_.size()); }
  WorldSet full_set() const { return WorldSet(worlds_.size()).set(); }
  /// Worlds of the whole universe where the formula holds.
  WorldSet valuation(const AtomicProp& atom) const;
  WorldSet valuation(const PropFormula& prop) const;

 private:
  TaskDomain domain_;
  std::vector<Assignment> worlds_;
};

/// Formulas of the evidence language: atoms, negation, conjunction, the
/// evidence/belief/universal modalities and public announcement.
class EpistemicFormula {
 public:
  enum class Kind { atom, negation, conjunction, evidence, belief, universal, announcement };

  static EpistemicFormula atom(AtomicProp p);
  static EpistemicFormula negation(EpistemicFormula f);
  static EpistemicFormula conjunction(EpistemicFormula f, EpistemicFormula g);
  static EpistemicFormula evidence(EpistemicFormula f);
  static EpistemicFormula belief(EpistemicFormula f);
  static EpistemicFormula universal(EpistemicFormula f);
  static EpistemicFormula announcement(PropFormula announced, EpistemicFormula then);
  /// Conjunction of the formula's atoms.
  static EpistemicFormula of(const PropFormula& prop);

  Kind kind() const noexcept;
  const AtomicProp& atom_value() const;
  const PropFormula& announced() const;
  /// Operand of unary nodes, left operand of conjunction, body of announcement.
  const EpistemicFormula& first() const;
  const EpistemicFormula& second() const;
  std::size_t depth() const noexcept;

 private:
  struct Node;
  explicit EpistemicFormula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// A finite evidence model. The evidence family is group-level (the same at
/// every world), kept sorted and duplicate-free; every neighborhood is a
/// nonempty subset of the remaining worlds. Values are immutable.
class EpistemicModel {
 public:
  /// Builds a model from explicit parts, validating the invariants.
  static EpistemicModel from_parts(std::shared_ptr<const WorldUniverse> universe,
                                   WorldSet worlds, std::vector<WorldSet> evidence);

  const WorldUniverse& universe() const noexcept { return *universe_; }
  const std::shared_ptr<const WorldUniverse>& universe_ptr() const noexcept { return universe_; }
  const TaskDomain& domain() const noexcept { return universe_->domain(); }
  const WorldSet& worlds() const noexcept { return worlds_; }
  std::size_t world_count() const noexcept { return worlds_.count(); }
  const std::vector<WorldSet>& evidence() const noexcept { return evidence_; }
  std::vector<Assignment> assignments(const WorldSet& set) const;

  bool operator==(const EpistemicModel& other) const {
    return worlds_ == other.worlds_ && evidence_ == other.evidence_;
  }

 private:
  EpistemicModel(std::shared_ptr<const WorldUniverse> universe, WorldSet worlds,
                 std::vector<WorldSet> evidence);

  std::shared_ptr<const WorldUniverse> universe_;
  WorldSet worlds_;
  std::vector<WorldSet> evidence_;
};

/// All |weights|^|blocks| worlds and an empty evidence family. Throws
/// Errc::too_many_worlds above `max_worlds`.
EpistemicModel init_model(const TaskDomain& domain, std::size_t max_worlds = kDefaultMaxWorlds);

WorldSet extension(const EpistemicModel& m, const PropFormula& p);

/// Public announcement: drops worlds falsifying p, restricts every
/// neighborhood to p (dropping emptied ones) and adds p itself as direct
/// evidence. Throws Errc::contradictory_model if no world survives.
EpistemicModel announce(const EpistemicModel& m, const PropFormula& p);

/// Adds the extension of p as a neighborhood without eliminating worlds.
/// Throws Errc::empty_evidence if p holds nowhere.
EpistemicModel add_evidence(const EpistemicModel& m, const PropFormula& p);

/// Worlds of m at which f is true.
WorldSet truth_set(const EpistemicModel& m, const EpistemicFormula& f);

/// Maximal subfamilies of the evidence with nonempty intersection, each as
/// sorted indices into m.evidence().
std::vector<std::vector<std::size_t>> maximal_consistent_families(const EpistemicModel& m);

bool holds_E(const EpistemicModel& m, const EpistemicFormula& f);
bool holds_B(const EpistemicModel& m, const EpistemicFormula& f);
bool holds_A(const EpistemicModel& m, const EpistemicFormula& f);

/// f is true at every world of m. Announcements of propositions that hold
/// nowhere are vacuously true.
bool check(const EpistemicModel& m, const EpistemicFormula& f);

}  // namespace cgt
