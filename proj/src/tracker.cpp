#include "cgt/tracker.hpp"

#include <algorithm>
#include <map>

#include "cgt/error.hpp"

namespace cgt {

PossibilityMap CGState::possibilities() const {
  PossibilityMap out;
  out.reserve(per_block.size());
  for (const auto& k : per_block) out.push_back(k.possibilities);
  return out;
}

CGState init_cgs(const TaskSetup& setup) {
  CGState s;
  s.domain = std::make_shared<const TaskDomain>(setup.domain);
  s.relational_facts = setup.relational_facts;
  s.per_block.assign(setup.domain.block_count(),
                     BlockKnowledge{setup.domain.weight_set(), {}, {}});
  for (const auto& seed : setup.seed_facts) {
    if (!seed.is_weight_equality()) {
      throw Error(Errc::invalid_seed, "seed '" + format_atom(setup.domain, seed) +
                                          "' is not a block-weight equality");
    }
    const Weight w = std::get<Weight>(seed.rhs);
    if (!setup.domain.contains(w)) {
      throw Error(Errc::invalid_seed, "seed weight " + std::to_string(w.grams) +
                                          " is not in the weight domain");
    }
    auto& poss = s.per_block.at(seed.lhs.index).possibilities;
    if (poss.count(w) == 0) {
      throw Error(Errc::invalid_seed, "seed '" + format_atom(setup.domain, seed) +
                                          "' conflicts with another seed");
    }
    poss = {w};
  }
  return s;
}

std::pair<std::size_t, std::size_t> knowledge_of(const CGState& s, BlockId block) {
  const auto& k = s.block(block);
  return {s.domain->weights().size() - k.possibilities.size(),
          k.evidence_for.size() + k.evidence_against.size()};
}

BlockId select_target(const AtomicProp& atom, const CGState& s) {
  if (const auto* rhs = std::get_if<BlockId>(&atom.rhs)) {
    if (knowledge_of(s, *rhs) < knowledge_of(s, atom.lhs)) return *rhs;
  }
  return atom.lhs;
}

namespace {

void note(Notes* notes, std::string text) {
  if (notes) notes->push_back(std::move(text));
}

/// Removes `weights` from a block's possibility and evidence sets.
/// Returns true if anything changed.
bool prune(CGState& s, BlockId block, const WeightSet& weights) {
  if (weights.empty()) return false;
  auto& k = s.per_block.at(block.index);
  bool changed = false;
  for (Weight w : weights) {
    changed |= k.possibilities.erase(w) > 0;
    k.evidence_for.erase(w);
    k.evidence_against.erase(w);
  }
  if (k.possibilities.empty()) {
    throw Error(Errc::inconsistent_state,
                "no weight remains possible for " + s.domain->name(block));
  }
  return changed;
}

/// Directed view of a block-block atom: from `from`, `rel` holds towards `to`.
struct Edge {
  BlockId from;
  Relation rel;
  BlockId to;
};

std::vector<Edge> edges_of(const std::set<AtomicProp>& atoms) {
  std::vector<Edge> edges;
  for (const auto& a : atoms) {
    if (const auto* b = std::get_if<BlockId>(&a.rhs)) {
      edges.push_back({a.lhs, a.rel, *b});
      edges.push_back({*b, flip(a.rel), a.lhs});
    }
  }
  return edges;
}

/// One round of derivations from the established atoms. Throws
/// inconsistent_state when a block would have to differ from itself.
std::set<AtomicProp> derive_once(const CGState& s) {
  std::set<AtomicProp> known = s.relations.accepted;
  known.insert(s.relations.derived.begin(), s.relations.derived.end());
  const auto edges = edges_of(known);

  std::set<AtomicProp> out;
  auto emit = [&](BlockId from, Relation rel, BlockId to) {
    if (from == to) {
      if (rel == Relation::eq) return;
      throw Error(Errc::inconsistent_state, "accepted relations force " +
                                                s.domain->name(from) + " " +
                                                std::string(relation_symbol(rel)) + " itself");
    }
    auto atom = make_atom(from, rel, to);
    if (known.count(atom) == 0) out.insert(std::move(atom));
  };

  for (const auto& first : edges) {
    for (const auto& second : edges) {
      if (first.to != second.from) continue;
      if (first.rel == Relation::eq) {
        // a = b, b R x  =>  a R x
        emit(first.from, second.rel, second.to);
      } else if (first.rel == Relation::lt && second.rel == Relation::lt) {
        // a < b, b < x  =>  a < x
        emit(first.from, Relation::lt, second.to);
      }
    }
  }

  // a = b, b = S  =>  a = S, when a is not a member of S.
  for (const auto& e : edges) {
    if (e.rel != Relation::eq) continue;
    for (const auto& atom : known) {
      const auto* sum = std::get_if<SumTerm>(&atom.rhs);
      if (sum == nullptr || atom.rel != Relation::eq || atom.lhs != e.to) continue;
      if (std::binary_search(sum->blocks.begin(), sum->blocks.end(), e.from)) continue;
      auto derived = make_atom(e.from, Relation::eq, *sum);
      if (known.count(derived) == 0) out.insert(std::move(derived));
    }
  }
  return out;
}

}  // namespace

CGState apply_statement(const CGState& s, const PropFormula& p, Notes* notes) {
  CGState next = s;
  const auto& domain = *next.domain;
  for (const auto& atom : p.atoms()) {
    const auto poss = next.possibilities();
    if (!satisfiable(atom, poss)) {
      note(notes, "statement '" + format_atom(domain, atom) +
                      "' contradicts established facts; no evidence recorded");
      continue;
    }
    if (atom.is_weight_equality()) {
      next.per_block.at(atom.lhs.index).evidence_for.insert(std::get<Weight>(atom.rhs));
      continue;
    }
    if (atom.is_relational() &&
        (next.relations.evidenced.count(atom) > 0 || next.relations.established(atom))) {
      continue;
    }
    const BlockId target = select_target(atom, next);
    const auto against = inconsistent_weights(atom, target, poss);
    next.per_block.at(target.index).evidence_against.insert(against.begin(), against.end());
    if (atom.is_relational()) next.relations.evidenced.insert(atom);
  }
  return next;
}

CGState apply_accept(const CGState& s, const PropFormula& p, Notes* notes) {
  CGState next = s;
  for (const auto& atom : p.atoms()) {
    const BlockId target = select_target(atom, next);
    prune(next, target, inconsistent_weights(atom, target, next.possibilities()));
    if (atom.is_relational()) {
      next.relations.evidenced.erase(atom);
      next.relations.derived.erase(atom);
      next.relations.accepted.insert(atom);
    }
  }
  return propagate(next, notes);
}

CGState propagate(const CGState& s, Notes* notes) {
  CGState next = s;
  bool changed = true;
  while (changed) {
    changed = false;

    std::vector<AtomicProp> constraints(next.relations.accepted.begin(),
                                        next.relations.accepted.end());
    constraints.insert(constraints.end(), next.relations.derived.begin(),
                       next.relations.derived.end());
    for (const auto& atom : constraints) {
      for (BlockId b : atom.blocks()) {
        changed |= prune(next, b, inconsistent_weights(atom, b, next.possibilities()));
      }
    }

    auto fresh = derive_once(next);
    if (!fresh.empty()) {
      next.relations.derived.insert(fresh.begin(), fresh.end());
      changed = true;
    }
  }

  // Evidence for a relation is superseded once the relation is established,
  // and lost once the remaining possibilities refute it.
  const auto poss = next.possibilities();
  for (auto it = next.relations.evidenced.begin(); it != next.relations.evidenced.end();) {
    if (next.relations.established(*it)) {
      it = next.relations.evidenced.erase(it);
    } else if (!satisfiable(*it, poss)) {
      note(notes, "evidence for '" + format_atom(*next.domain, *it) +
                      "' dropped: refuted by accepted facts");
      it = next.relations.evidenced.erase(it);
    } else {
      ++it;
    }
  }
  return next;
}

Banks generate_banks(const CGState& s) {
  Banks banks;
  const auto& domain = *s.domain;
  for (BlockId b : domain.blocks()) {
    const auto& k = s.block(b);
    const std::string& name = domain.name(b);
    if (k.resolved()) {
      banks.fbank.insert(name + " = " + std::to_string(k.possibilities.begin()->grams));
      continue;
    }
    for (Weight w : k.evidence_for) banks.ebank.insert(name + " = " + std::to_string(w.grams));
    for (Weight w : k.evidence_against) {
      banks.ebank.insert(name + " != " + std::to_string(w.grams));
    }
    for (Weight w : k.possibilities) {
      if (k.evidence_for.count(w) == 0 && k.evidence_against.count(w) == 0) {
        banks.qbank.insert(format_question(domain, b, w));
      }
    }
  }
  for (const auto& atom : s.relations.evidenced) banks.ebank.insert(format_atom(domain, atom));
  if (s.relational_facts) {
    for (const auto& atom : s.relations.accepted) banks.fbank.insert(format_atom(domain, atom));
    for (const auto& atom : s.relations.derived) banks.fbank.insert(format_atom(domain, atom));
  }
  return banks;
}

std::string_view status_name(MoveStatus status) noexcept {
  switch (status) {
    case MoveStatus::applied: return "applied";
    case MoveStatus::passed_through: return "passed-through";
    case MoveStatus::skipped: return "skipped";
    case MoveStatus::rejected: return "rejected";
  }
  return "unknown";
}

MoveOutcome apply_move(const CGState& s, const Move& m) {
  MoveOutcome out{s, {}, MoveStatus::applied, {}};
  if (!m.needs_proposition()) {
    out.state.history.push_back(m);
    out.status = MoveStatus::passed_through;
    out.banks = generate_banks(out.state);
    return out;
  }
  if (!m.prop) {
    out.status = MoveStatus::skipped;
    out.notes.push_back("MissingProposition: " + std::string(label_name(*m.label)) + " move '" +
                        m.utterance_id + "' has no propositional content; skipped");
    out.banks = generate_banks(out.state);
    return out;
  }
  try {
    out.state = *m.label == MoveLabel::statement ? apply_statement(s, *m.prop, &out.notes)
                                                 : apply_accept(s, *m.prop, &out.notes);
    out.state.history.push_back(m);
  } catch (const Error& e) {
    if (e.code() != Errc::inconsistent_state) throw;
    out.state = s;
    out.status = MoveStatus::rejected;
    out.notes.push_back("InconsistentState: move '" + m.utterance_id + "' rejected: " + e.what());
  }
  out.banks = generate_banks(out.state);
  return out;
}

EpistemicModel mirror_to_kernel(const TaskSetup& setup, std::span<const Move> moves,
                                std::size_t max_worlds) {
  EpistemicModel m = init_model(setup.domain, max_worlds);
  for (const auto& seed : setup.seed_facts) {
    m = announce(m, PropFormula::make(setup.domain, {seed}));
  }
  for (const auto& move : moves) {
    if (!move.prop || !move.label) continue;
    if (*move.label == MoveLabel::accept) {
      m = announce(m, *move.prop);
    } else if (*move.label == MoveLabel::statement) {
      for (const auto& atom : move.prop->atoms()) {
        auto single = PropFormula::make(setup.domain, {atom});
        if (extension(m, single).any()) m = add_evidence(m, single);
      }
    }
  }
  return m;
}

}  // namespace cgt
