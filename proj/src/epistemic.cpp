#include "cgt/epistemic.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "cgt/error.hpp"

namespace cgt {

// ---------------------------------------------------------------------------
// WorldUniverse

WorldUniverse::WorldUniverse(TaskDomain domain, std::size_t max_worlds)
    : domain_(std::move(domain)) {
  const std::size_t radix = domain_.weights().size();
  const std::size_t blocks = domain_.block_count();
  std::size_t count = 1;
  for (std::size_t i = 0; i < blocks; ++i) {
    if (count > max_worlds / radix) {
      throw Error(Errc::too_many_worlds, "world count exceeds the cap of " +
                                             std::to_string(max_worlds));
    }
    count *= radix;
  }
  if (count > max_worlds) {
    throw Error(Errc::too_many_worlds, "world count exceeds the cap of " +
                                           std::to_string(max_worlds));
  }

  worlds_.reserve(count);
  const auto ids = domain_.blocks();
  const auto weights = domain_.weights();
  for (std::size_t code = 0; code < count; ++code) {
    Assignment a(blocks);
    std::size_t rest = code;
    for (BlockId b : ids) {
      a.set(b, weights[rest % radix]);
      rest /= radix;
    }
    worlds_.push_back(std::move(a));
  }
}

WorldSet WorldUniverse::valuation(const AtomicProp& atom) const {
  WorldSet out(worlds_.size());
  for (std::size_t i = 0; i < worlds_.size(); ++i) {
    if (eval_atom(atom, worlds_[i])) out.set(i);
  }
  return out;
}

WorldSet WorldUniverse::valuation(const PropFormula& prop) const {
  WorldSet out(worlds_.size());
  for (std::size_t i = 0; i < worlds_.size(); ++i) {
    if (eval_formula(prop, worlds_[i])) out.set(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// EpistemicFormula

struct EpistemicFormula::Node {
  Kind kind;
  std::optional<AtomicProp> atom;
  std::optional<PropFormula> announced;
  std::optional<EpistemicFormula> first;
  std::optional<EpistemicFormula> second;
  std::size_t depth = 1;
};

EpistemicFormula EpistemicFormula::atom(AtomicProp p) {
  return EpistemicFormula(std::make_shared<const Node>(
      Node{Kind::atom, std::move(p), std::nullopt, std::nullopt, std::nullopt, 1}));
}

EpistemicFormula EpistemicFormula::negation(EpistemicFormula f) {
  const auto d = f.depth() + 1;
  return EpistemicFormula(std::make_shared<const Node>(
      Node{Kind::negation, std::nullopt, std::nullopt, std::move(f), std::nullopt, d}));
}

EpistemicFormula EpistemicFormula::conjunction(EpistemicFormula f, EpistemicFormula g) {
  const auto d = std::max(f.depth(), g.depth()) + 1;
  return EpistemicFormula(std::make_shared<const Node>(
      Node{Kind::conjunction, std::nullopt, std::nullopt, std::move(f), std::move(g), d}));
}

EpistemicFormula EpistemicFormula::evidence(EpistemicFormula f) {
  const auto d = f.depth() + 1;
  return EpistemicFormula(std::make_shared<const Node>(
      Node{Kind::evidence, std::nullopt, std::nullopt, std::move(f), std::nullopt, d}));
}

EpistemicFormula EpistemicFormula::belief(EpistemicFormula f) {
  const auto d = f.depth() + 1;
  return EpistemicFormula(std::make_shared<const Node>(
      Node{Kind::belief, std::nullopt, std::nullopt, std::move(f), std::nullopt, d}));
}

EpistemicFormula EpistemicFormula::universal(EpistemicFormula f) {
  const auto d = f.depth() + 1;
  return EpistemicFormula(std::make_shared<const Node>(
      Node{Kind::universal, std::nullopt, std::nullopt, std::move(f), std::nullopt, d}));
}

EpistemicFormula EpistemicFormula::announcement(PropFormula announced, EpistemicFormula then) {
  const auto d = then.depth() + 1;
  return EpistemicFormula(std::make_shared<const Node>(Node{
      Kind::announcement, std::nullopt, std::move(announced), std::move(then), std::nullopt, d}));
}

EpistemicFormula EpistemicFormula::of(const PropFormula& prop) {
  const auto atoms = prop.atoms();
  EpistemicFormula f = atom(atoms.front());
  for (std::size_t i = 1; i < atoms.size(); ++i) f = conjunction(f, atom(atoms[i]));
  return f;
}

EpistemicFormula::Kind EpistemicFormula::kind() const noexcept { return node_->kind; }

const AtomicProp& EpistemicFormula::atom_value() const { return node_->atom.value(); }

const PropFormula& EpistemicFormula::announced() const { return node_->announced.value(); }

const EpistemicFormula& EpistemicFormula::first() const { return *node_->first; }

const EpistemicFormula& EpistemicFormula::second() const { return *node_->second; }

std::size_t EpistemicFormula::depth() const noexcept { return node_->depth; }

// ---------------------------------------------------------------------------
// EpistemicModel

namespace {

void normalize_family(std::vector<WorldSet>& family) {
  std::sort(family.begin(), family.end());
  family.erase(std::unique(family.begin(), family.end()), family.end());
}

}  // namespace

EpistemicModel::EpistemicModel(std::shared_ptr<const WorldUniverse> universe, WorldSet worlds,
                               std::vector<WorldSet> evidence)
    : universe_(std::move(universe)), worlds_(std::move(worlds)), evidence_(std::move(evidence)) {
  normalize_family(evidence_);
}

EpistemicModel EpistemicModel::from_parts(std::shared_ptr<const WorldUniverse> universe,
                                          WorldSet worlds, std::vector<WorldSet> evidence) {
  if (!universe) throw Error(Errc::empty_domain, "model needs a world universe");
  if (worlds.size() != universe->size()) {
    throw Error(Errc::invalid_domain, "world set does not match the universe");
  }
  for (const auto& x : evidence) {
    if (x.size() != universe->size() || x.none() || !x.is_subset_of(worlds)) {
      throw Error(Errc::empty_evidence,
                  "evidence neighborhoods must be nonempty subsets of the worlds");
    }
  }
  return EpistemicModel(std::move(universe), std::move(worlds), std::move(evidence));
}

std::vector<Assignment> EpistemicModel::assignments(const WorldSet& set) const {
  std::vector<Assignment> out;
  for (auto i = set.find_first(); i != WorldSet::npos; i = set.find_next(i)) {
    out.push_back(universe_->world(i));
  }
  return out;
}

EpistemicModel init_model(const TaskDomain& domain, std::size_t max_worlds) {
  auto universe = std::make_shared<const WorldUniverse>(domain, max_worlds);
  auto worlds = universe->full_set();
  return EpistemicModel::from_parts(std::move(universe), std::move(worlds), {});
}

WorldSet extension(const EpistemicModel& m, const PropFormula& p) {
  return m.universe().valuation(p) & m.worlds();
}

EpistemicModel announce(const EpistemicModel& m, const PropFormula& p) {
  WorldSet survivors = extension(m, p);
  if (survivors.none()) {
    throw Error(Errc::contradictory_model,
                "announcement of '" + format_prop(m.domain(), p) + "' leaves no world");
  }
  std::vector<WorldSet> evidence;
  evidence.reserve(m.evidence().size() + 1);
  for (const auto& x : m.evidence()) {
    WorldSet restricted = x & survivors;
    if (restricted.any()) evidence.push_back(std::move(restricted));
  }
  evidence.push_back(survivors);
  return EpistemicModel::from_parts(m.universe_ptr(), std::move(survivors), std::move(evidence));
}

EpistemicModel add_evidence(const EpistemicModel& m, const PropFormula& p) {
  WorldSet x = extension(m, p);
  if (x.none()) {
    throw Error(Errc::empty_evidence,
                "'" + format_prop(m.domain(), p) + "' holds in no remaining world");
  }
  std::vector<WorldSet> evidence = m.evidence();
  evidence.push_back(std::move(x));
  return EpistemicModel::from_parts(m.universe_ptr(), m.worlds(), std::move(evidence));
}

// ---------------------------------------------------------------------------
// Modalities

std::vector<std::vector<std::size_t>> maximal_consistent_families(const EpistemicModel& m) {
  const auto& family = m.evidence();
  if (family.empty()) return {{}};

  // A subfamily has a common world w iff it is contained in the set of
  // neighborhoods holding w, so the maximal ones are the maximal such sets.
  std::vector<boost::dynamic_bitset<>> memberships;
  const auto& worlds = m.worlds();
  for (auto w = worlds.find_first(); w != WorldSet::npos; w = worlds.find_next(w)) {
    boost::dynamic_bitset<> mask(family.size());
    for (std::size_t i = 0; i < family.size(); ++i) {
      if (family[i].test(w)) mask.set(i);
    }
    if (mask.any()) memberships.push_back(std::move(mask));
  }
  std::sort(memberships.begin(), memberships.end());
  memberships.erase(std::unique(memberships.begin(), memberships.end()), memberships.end());

  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < memberships.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < memberships.size() && !dominated; ++j) {
      dominated = i != j && memberships[i].is_proper_subset_of(memberships[j]);
    }
    if (dominated) continue;
    std::vector<std::size_t> indices;
    for (auto k = memberships[i].find_first(); k != boost::dynamic_bitset<>::npos;
         k = memberships[i].find_next(k)) {
      indices.push_back(k);
    }
    out.push_back(std::move(indices));
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void require_consistent(const EpistemicModel& m) {
  if (m.worlds().none()) throw Error(Errc::contradictory_model, "model has no worlds");
}

bool evidence_supports(const EpistemicModel& m, const WorldSet& truth) {
  return std::any_of(m.evidence().begin(), m.evidence().end(),
                     [&](const WorldSet& x) { return x.is_subset_of(truth); });
}

bool belief_supports(const EpistemicModel& m, const WorldSet& truth) {
  for (const auto& indices : maximal_consistent_families(m)) {
    WorldSet common = m.worlds();
    for (std::size_t i : indices) common &= m.evidence()[i];
    if (!common.is_subset_of(truth)) return false;
  }
  return true;
}

WorldSet all_or_nothing(const EpistemicModel& m, bool value) {
  return value ? m.worlds() : m.universe().empty_set();
}

}  // namespace

WorldSet truth_set(const EpistemicModel& m, const EpistemicFormula& f) {
  using Kind = EpistemicFormula::Kind;
  switch (f.kind()) {
    case Kind::atom:
      return m.universe().valuation(f.atom_value()) & m.worlds();
    case Kind::negation:
      return m.worlds() - truth_set(m, f.first());
    case Kind::conjunction:
      return truth_set(m, f.first()) & truth_set(m, f.second());
    case Kind::evidence:
      return all_or_nothing(m, evidence_supports(m, truth_set(m, f.first())));
    case Kind::belief:
      return all_or_nothing(m, belief_supports(m, truth_set(m, f.first())));
    case Kind::universal:
      return all_or_nothing(m, m.worlds().is_subset_of(truth_set(m, f.first())));
    case Kind::announcement: {
      WorldSet announced = extension(m, f.announced());
      if (announced.none()) return m.worlds();
      WorldSet after = truth_set(announce(m, f.announced()), f.first());
      return (m.worlds() - announced) | after;
    }
  }
  return m.universe().empty_set();
}

bool holds_E(const EpistemicModel& m, const EpistemicFormula& f) {
  require_consistent(m);
  return evidence_supports(m, truth_set(m, f));
}

bool holds_B(const EpistemicModel& m, const EpistemicFormula& f) {
  require_consistent(m);
  return belief_supports(m, truth_set(m, f));
}

bool holds_A(const EpistemicModel& m, const EpistemicFormula& f) {
  require_consistent(m);
  return m.worlds().is_subset_of(truth_set(m, f));
}

bool check(const EpistemicModel& m, const EpistemicFormula& f) {
  return m.worlds().is_subset_of(truth_set(m, f));
}

}  // namespace cgt
