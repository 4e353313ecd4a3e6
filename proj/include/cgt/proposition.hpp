#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cgt {

/// Index of a block in the task's configured block order. The order is
/// total and is the one used for canonicalization.
struct BlockId {
  std::uint16_t index = 0;

  auto operator<=>(const BlockId&) const = default;
};

struct Weight {
  int grams = 0;

  auto operator<=>(const Weight&) const = default;
};

enum class Relation { eq, lt, gt, neq };

std::string_view relation_symbol(Relation rel) noexcept;
Relation flip(Relation rel) noexcept;
bool compare(int lhs, Relation rel, int rhs) noexcept;

/// Two or more distinct blocks joined by `+`, kept sorted by block order.
struct SumTerm {
  std::vector<BlockId> blocks;

  auto operator<=>(const SumTerm&) const = default;
};

using Term = std::variant<Weight, BlockId, SumTerm>;

struct AtomicProp {
  BlockId lhs;
  Relation rel = Relation::eq;
  Term rhs;

  auto operator<=>(const AtomicProp&) const = default;

  bool has_weight_rhs() const noexcept { return std::holds_alternative<Weight>(rhs); }
  /// Block-block and block-sum atoms.
  bool is_relational() const noexcept { return !has_weight_rhs(); }
  bool is_weight_equality() const noexcept { return rel == Relation::eq && has_weight_rhs(); }
  bool mentions(BlockId block) const noexcept;
  /// lhs first, then rhs blocks in order.
  std::vector<BlockId> blocks() const;
};

/// Validates and normalizes an atom: one-block sums collapse to a block
/// term, sums are sorted, and block-block atoms are ordered so the lhs
/// precedes the rhs (flipping < and >). Throws Errc::invalid_atom when the
/// lhs occurs on the right or a sum repeats a block.
AtomicProp canonical(AtomicProp atom);

AtomicProp make_atom(BlockId lhs, Relation rel, Term rhs);

using WeightSet = std::set<Weight>;
/// Per-block weight sets, indexed by BlockId::index.
using PossibilityMap = std::vector<WeightSet>;

/// The configured blocks and weight domain of a task.
class TaskDomain {
 public:
  TaskDomain(std::vector<std::string> block_names, std::vector<int> weights);

  /// Five blocks, 10..50 g in 10 g steps.
  static TaskDomain weights_task();

  std::size_t block_count() const noexcept { return names_.size(); }
  std::span<const std::string> block_names() const noexcept { return names_; }
  const std::string& name(BlockId block) const;
  std::vector<BlockId> blocks() const;
  std::optional<BlockId> find_block(std::string_view name) const;

  std::span<const Weight> weights() const noexcept { return weights_; }
  bool contains(Weight weight) const noexcept;
  WeightSet weight_set() const { return {weights_.begin(), weights_.end()}; }
  PossibilityMap full_possibilities() const;

  bool operator==(const TaskDomain&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<Weight> weights_;
};

/// A partial map from blocks to weights.
class Assignment {
 public:
  explicit Assignment(std::size_t block_count) : values_(block_count) {}
  Assignment(std::size_t block_count,
             std::initializer_list<std::pair<BlockId, Weight>> values);

  void set(BlockId block, Weight weight);
  std::optional<Weight> get(BlockId block) const;
  /// Throws Errc::missing_block if unassigned.
  Weight at(BlockId block) const;
  std::size_t size() const noexcept { return values_.size(); }

  bool operator==(const Assignment&) const = default;
  auto operator<=>(const Assignment&) const = default;

 private:
  std::vector<std::optional<Weight>> values_;
};

/// A nonempty conjunction of canonical atoms, duplicate-free and sorted by
/// canonical string.
class PropFormula {
 public:
  static PropFormula make(const TaskDomain& domain, std::vector<AtomicProp> atoms);

  std::span<const AtomicProp> atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  bool operator==(const PropFormula&) const = default;
  auto operator<=>(const PropFormula&) const = default;

 private:
  explicit PropFormula(std::vector<AtomicProp> atoms) : atoms_(std::move(atoms)) {}

  std::vector<AtomicProp> atoms_;
};

/// Surface grammar:
///   formula ::= atom (("and" | "∧") atom)*
///   atom    ::= block rel rhs        rel ::= "=" | "<" | ">" | "!="
///   rhs     ::= weight | block ("+" block)*
/// Block names and `and` are case-insensitive; whitespace is ignored.
PropFormula parse_prop(const TaskDomain& domain, std::string_view text);
AtomicProp parse_atom(const TaskDomain& domain, std::string_view text);

std::string format_atom(const TaskDomain& domain, const AtomicProp& atom);
std::string format_prop(const TaskDomain& domain, const PropFormula& prop);
/// "red = 10?" form used in the question bank.
std::string format_question(const TaskDomain& domain, BlockId block, Weight weight);

bool eval_atom(const AtomicProp& atom, const Assignment& assignment);
bool eval_formula(const PropFormula& prop, const Assignment& assignment);

/// Weights of `target` for which no choice of the other blocks' weights
/// (drawn from `possibilities`) satisfies the atom. Always a subset of
/// possibilities[target].
WeightSet inconsistent_weights(const AtomicProp& atom, BlockId target,
                               const PossibilityMap& possibilities);

/// True if some assignment drawn from `possibilities` satisfies the atom.
bool satisfiable(const AtomicProp& atom, const PossibilityMap& possibilities);

inline constexpr std::size_t kDefaultCatalogCap = 200'000;

/// Every canonical atom of the domain (block-weight equalities, block-block
/// relations for each unordered pair, block = sum of distinct others).
std::vector<AtomicProp> atomic_catalog(const TaskDomain& domain);

/// Atoms plus their duplicate-free conjunctions of up to `max_conjuncts`
/// atoms, sorted by size then canonical string.
std::vector<PropFormula> generate_catalog(const TaskDomain& domain, int max_conjuncts,
                                          std::size_t cap = kDefaultCatalogCap);

}  // namespace cgt
