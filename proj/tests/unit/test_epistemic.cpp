#include "doctest.h"

#include "cgt/epistemic.hpp"
#include "cgt/error.hpp"
#include "oracles.hpp"

using namespace cgt;
using F = EpistemicFormula;

namespace {

const TaskDomain kTwo({"r", "b"}, {10, 20});

PropFormula prop(const TaskDomain& d, const char* text) { return parse_prop(d, text); }
F atom(const TaskDomain& d, const char* text) { return F::atom(parse_atom(d, text)); }

bool throws_code(Errc code, const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace

TEST_CASE("initial models count every assignment") {
  CHECK(init_model(TaskDomain::weights_task()).world_count() == 3125);
  CHECK(init_model(kTwo).world_count() == 4);
  const TaskDomain one({"x"}, {10});
  const auto m = init_model(one);
  CHECK(m.world_count() == 1);
  CHECK(holds_A(m, atom(one, "x = 10")));
  CHECK(m.evidence().empty());
  CHECK(throws_code(Errc::too_many_worlds, [] { init_model(TaskDomain::weights_task(), 100); }));
}

TEST_CASE("extension and announcement") {
  const auto m = init_model(kTwo);
  const auto p = prop(kTwo, "r = 10");
  CHECK(extension(m, p).count() == 2);

  const auto a = announce(m, p);
  CHECK(a.world_count() == 2);
  REQUIRE(a.evidence().size() == 1);
  CHECK(a.evidence()[0] == extension(m, p));
  CHECK(extension(a, p) == a.worlds());
  CHECK(announce(a, p) == a);
  CHECK(throws_code(Errc::contradictory_model, [&] { announce(a, prop(kTwo, "r = 20")); }));
}

TEST_CASE("evidence, belief, knowledge") {
  const auto m = init_model(kTwo);
  const auto r10 = atom(kTwo, "r = 10");
  CHECK_FALSE(holds_E(m, r10));
  CHECK_FALSE(holds_A(m, r10));

  const auto a = announce(m, prop(kTwo, "r = 10"));
  CHECK(holds_E(a, r10));
  CHECK(holds_A(a, r10));
  CHECK(holds_B(a, r10));

  const auto e = add_evidence(m, prop(kTwo, "r = 10"));
  CHECK(e.worlds() == m.worlds());
  CHECK(holds_E(e, r10));
  CHECK(holds_B(e, r10));
  CHECK_FALSE(holds_A(e, r10));
  CHECK(add_evidence(e, prop(kTwo, "r = 10")).evidence().size() == 1);

  // Contradictory evidence: both the atom and its negation are evidenced.
  const auto both = add_evidence(e, prop(kTwo, "r = 20"));
  CHECK(holds_E(both, r10));
  CHECK(holds_E(both, F::negation(r10)));
  CHECK_FALSE(holds_B(both, r10));
  CHECK(maximal_consistent_families(both).size() == 2);

  // Evidence then acceptance yields belief.
  const auto accepted = announce(e, prop(kTwo, "r = 10"));
  CHECK(holds_B(accepted, r10));

  CHECK(throws_code(Errc::empty_evidence, [&] { add_evidence(a, prop(kTwo, "r = 20")); }));
}

TEST_CASE("validity and announcement formulas") {
  const auto m = init_model(kTwo);
  const auto r10 = atom(kTwo, "r = 10");
  CHECK(holds_A(m, F::negation(F::conjunction(r10, F::negation(r10)))));
  CHECK_FALSE(check(m, F::conjunction(r10, F::negation(r10))));
  CHECK(check(m, F::announcement(prop(kTwo, "r = 10"), F::evidence(r10))));
  const auto inner = F::belief(atom(kTwo, "r < b"));
  CHECK(check(m, F::announcement(prop(kTwo, "r = 10"),
                                 F::announcement(prop(kTwo, "r = 10"), inner))) ==
        check(m, F::announcement(prop(kTwo, "r = 10"), inner)));
  // Announcing something already refuted is vacuously true.
  const auto a = announce(m, prop(kTwo, "r = 10"));
  CHECK(check(a, F::announcement(prop(kTwo, "r = 20"), F::conjunction(r10, F::negation(r10)))));
}

TEST_CASE("belief agrees with explicit subfamily enumeration") {
  oracle::Rng rng(21);
  const TaskDomain d({"a", "b"}, {10, 20, 30});
  for (int trial = 0; trial < 300; ++trial) {
    auto m = init_model(d);
    const std::size_t n = oracle::uniform(rng, 5);
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = oracle::random_prop(rng, d, 1);
      if (extension(m, p).any()) m = add_evidence(m, p);
    }
    const auto ref = oracle::from_model(m);
    const std::vector<std::set<std::size_t>> family(ref.evidence.begin(), ref.evidence.end());
    const auto expected = oracle::ref_maximal_fip(family, ref.worlds);
    const auto got = maximal_consistent_families(m);
    if (m.evidence().empty()) {
      CHECK(got == std::vector<std::vector<std::size_t>>{{}});
    } else {
      // Index orders differ between the two families; compare the sets.
      using Family = std::set<std::set<std::size_t>>;
      std::set<Family> got_sets, want_sets;
      for (const auto& members : got) {
        Family f;
        for (auto i : members) f.insert(oracle::to_index_set(m.evidence()[i]));
        got_sets.insert(f);
      }
      for (const auto& members : expected) {
        Family f;
        for (auto i : members) f.insert(family[i]);
        want_sets.insert(f);
      }
      CHECK(got_sets == want_sets);
    }
    const auto f = oracle::random_formula(rng, d, 1);
    CHECK(holds_B(m, f) == !oracle::ref_truth(ref, F::belief(f)).empty());
  }
}

TEST_CASE("check agrees with a reference evaluator") {
  oracle::Rng rng(22);
  const TaskDomain d({"a", "b"}, {10, 20});
  for (int trial = 0; trial < 500; ++trial) {
    auto m = init_model(d);
    oracle::RefModel ref = oracle::ref_init(d);
    for (std::size_t i = 0, n = oracle::uniform(rng, 4); i < n; ++i) {
      const auto p = oracle::random_prop(rng, d, 1);
      if (oracle::uniform(rng, 3) == 0) {
        if (extension(m, p).count() == 0) continue;
        m = announce(m, p);
        REQUIRE(oracle::ref_announce(ref, p));
      } else if (extension(m, p).any()) {
        m = add_evidence(m, p);
        REQUIRE(oracle::ref_add_evidence(ref, p));
      }
    }
    CHECK(oracle::from_model(m).evidence == ref.evidence);
    const auto f = oracle::random_formula(rng, d, 4);
    const auto expected = oracle::ref_truth(ref, f);
    CHECK(oracle::to_index_set(truth_set(m, f)) == expected);
    CHECK(check(m, f) == (expected == ref.worlds));
  }
}

TEST_CASE("model invariants are enforced") {
  const auto universe = std::make_shared<const WorldUniverse>(kTwo);
  auto worlds = universe->full_set();
  CHECK(throws_code(Errc::empty_evidence, [&] {
    EpistemicModel::from_parts(universe, worlds, {universe->empty_set()});
  }));
  auto half = universe->valuation(parse_atom(kTwo, "r = 10"));
  const auto m = EpistemicModel::from_parts(universe, half, {half, half});
  CHECK(m.evidence().size() == 1);
  CHECK(throws_code(Errc::contradictory_model, [&] {
    holds_A(EpistemicModel::from_parts(universe, universe->empty_set(), {}), atom(kTwo, "r = 10"));
  }));
}
