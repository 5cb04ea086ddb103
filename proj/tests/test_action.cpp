#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <optional>
#include <tuple>

#include "fixtures.hpp"
#include "tracedyn/action.hpp"
#include "tracedyn/trace.hpp"

using namespace tracedyn;

namespace {

// Independent oracle for the lock/unlock axioms, phrased through the
// completed action and two-letter words instead of the table checks.
struct Violation {
  int s, a, b;
  std::string kind;
  bool operator<(const Violation& o) const {
    return std::tie(s, a, b) < std::tie(o.s, o.a, o.b);
  }
};

std::optional<Violation> first_axiom_violation(const PartialAction& pa) {
  const TotalAction ta = complete_total(pa);
  const Monoid& m = pa.monoid;
  std::optional<Violation> best;
  for (int s = 0; s < pa.state_count(); ++s)
    for (int a = 0; a < m.alphabet_size(); ++a) {
      if (!pa.is_enabled(s, a)) continue;
      for (int b = 0; b < m.alphabet_size(); ++b) {
        if (!m.independent(a, b)) continue;
        // apply the letters in order, without trace normalization: the two
        // word readings must land on the same live state
        const int u = ta.apply(ta.apply(s, a), b);
        std::optional<Violation> v;
        if (pa.is_enabled(s, b)) {
          const int w = ta.apply(ta.apply(s, b), a);
          if (u == kBottom || w == kBottom || u != w) v = Violation{s, a, b, "AxiomIViolated"};
        } else if (u != kBottom) {
          v = Violation{s, a, b, "AxiomIIViolated"};
        }
        if (v && (!best || *v < *best)) best = v;
      }
    }
  return best;
}

// Every single-transition rewire and single enabled-letter deletion,
// classified by the oracle and checked against the validator's verdict.
void mutation_sweep(const PartialAction& base, int* caught_i, int* caught_ii, int* valid_mutants) {
  const int n = base.state_count();
  const int A = base.monoid.alphabet_size();
  auto verdict = [&](const PartialAction& mutant, const char* what) {
    const auto expected = first_axiom_violation(mutant);
    try {
      validate_partial_action(mutant);
      INFO("mutant " << what << " accepted");
      CHECK_FALSE(expected.has_value());
      if (valid_mutants) ++*valid_mutants;
    } catch (const DomainError& e) {
      INFO("mutant " << what << " rejected with " << e.what());
      REQUIRE(expected.has_value());
      CHECK(e.kind() == expected->kind);
      if (expected->kind == "AxiomIViolated" && caught_i) ++*caught_i;
      if (expected->kind == "AxiomIIViolated" && caught_ii) ++*caught_ii;
    }
  };
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < A; ++a) {
      if (!base.is_enabled(s, a)) continue;
      for (int t = 0; t < n; ++t) {
        if (t == base.step[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)]) continue;
        PartialAction mutant = base;
        mutant.step[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] = t;
        verdict(mutant, "rewire");
      }
      PartialAction mutant = base;
      mutant.enabled[static_cast<std::size_t>(s)] &= ~(Clique{1} << a);
      mutant.step[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] = kBottom;
      if (mutant.enabled[static_cast<std::size_t>(s)] == 0) {
        CHECK_THROWS_AS(validate_partial_action(mutant), DomainError);
      } else {
        verdict(mutant, "deletion");
      }
    }
}

}  // namespace

TEST_CASE("tip-top action of <a,b,c|ac=ca>") {
  Monoid m = fixtures::monoid_abc();
  PartialAction pa = tip_top(m);
  CHECK(pa.states == std::vector<std::string>{"1", "a", "b", "c", "a.c"});
  const int a = m.letter("a"), b = m.letter("b"), c = m.letter("c");
  auto s = [&](const char* n) { return fixtures::state_index(pa, n); };
  CHECK(pa.step[static_cast<std::size_t>(s("1"))][static_cast<std::size_t>(a)] == s("a"));
  CHECK(pa.step[static_cast<std::size_t>(s("a"))][static_cast<std::size_t>(a)] == s("1"));
  CHECK(pa.step[static_cast<std::size_t>(s("a"))][static_cast<std::size_t>(c)] == s("a.c"));
  CHECK(pa.step[static_cast<std::size_t>(s("a.c"))][static_cast<std::size_t>(c)] == s("a"));
  CHECK(pa.enabled[static_cast<std::size_t>(s("1"))] == 0b111u);
  CHECK(pa.enabled[static_cast<std::size_t>(s("a"))] == 0b101u);
  CHECK(pa.enabled[static_cast<std::size_t>(s("b"))] == 0b010u);
  CHECK_FALSE(pa.is_enabled(s("b"), a));
}

TEST_CASE("acting with traces and the sink") {
  Monoid m = fixtures::monoid_abc();
  PartialAction pa = tip_top(m);
  TotalAction ta = complete_total(pa);
  auto s = [&](const char* n) { return fixtures::state_index(pa, n); };
  const Trace x = normalize(m, std::vector<std::string>{"a", "c", "a"});
  CHECK(act(ta, s("1"), x) == s("c"));
  CHECK(act_clique(ta, s("1"), 0b101) == s("a.c"));
  CHECK(act(ta, s("b"), normalize(m, std::vector<std::string>{"a"})) == kBottom);
  CHECK(ta.apply(kBottom, 0) == kBottom);  // the sink absorbs
  CHECK(language_membership(pa, s("1"), x));
  CHECK_FALSE(language_membership(pa, s("b"), x));
}

TEST_CASE("support language is downward closed") {
  Monoid m = fixtures::monoid_abc();
  PartialAction pa = tip_top(m);
  for (const Trace& x : enumerate_traces(m, 5))
    for (int s = 0; s < pa.state_count(); ++s)
      if (language_membership(pa, s, x))
        for (const Trace& y : enumerate_traces(m, 5))
          if (trace_leq(m, y, x)) CHECK(language_membership(pa, s, y));
}

TEST_CASE("validator structural errors") {
  Monoid m = fixtures::monoid_free2();
  // no letter enabled at the second state
  CHECK_THROWS_WITH_AS(
      build_partial_action(m, {"x", "y"}, {0b01, 0b00}, {{1, kBottom}, {kBottom, kBottom}}),
      "EmptyEnabledSet: state y enables no letter", DomainError);
  // step defined on a disabled letter
  CHECK_THROWS_AS(build_partial_action(m, {"x", "y"}, {0b01, 0b01}, {{1, 0}, {0, kBottom}}),
                  DomainError);
  // target out of range
  CHECK_THROWS_AS(build_partial_action(m, {"x", "y"}, {0b01, 0b01}, {{7, kBottom}, {0, kBottom}}),
                  DomainError);
}

TEST_CASE("hand-built axiom violations") {
  Monoid m = fixtures::monoid_abc();
  PartialAction base = tip_top(m);
  auto s = [&](const char* n) { return fixtures::state_index(base, n); };
  const int a = m.letter("a"), c = m.letter("c");

  // break commutation: from 1, send a.c and c.a to different tilings
  PartialAction bad1 = base;
  bad1.step[static_cast<std::size_t>(s("a"))][static_cast<std::size_t>(c)] = s("1");
  try {
    validate_partial_action(bad1);
    CHECK(false);
  } catch (const DomainError& e) {
    CHECK(e.kind() == "AxiomIViolated");
  }

  // unlock: make c spring to life after an unrelated a-step
  PartialAction bad2 = base;
  bad2.enabled[static_cast<std::size_t>(s("1"))] &= ~(Clique{1} << c);
  bad2.step[static_cast<std::size_t>(s("1"))][static_cast<std::size_t>(c)] = kBottom;
  try {
    validate_partial_action(bad2);
    CHECK(false);
  } catch (const DomainError& e) {
    CHECK(e.kind() == "AxiomIIViolated");
  }
  (void)a;
}

TEST_CASE("mutation sweep agrees with the commutation oracle") {
  int ci = 0, cii = 0, ok = 0;
  mutation_sweep(tip_top(fixtures::monoid_abc()), &ci, &cii, &ok);
  CHECK(ci > 0);   // some mutants must break commutation
  CHECK(cii > 0);  // and some must unlock
  // the free monoid has no axioms to break: every mutant validates
  int fci = 0, fcii = 0, fok = 0;
  mutation_sweep(tip_top(fixtures::monoid_free2()), &fci, &fcii, &fok);
  CHECK(fci == 0);
  CHECK(fcii == 0);
  CHECK(fok > 0);
}

TEST_CASE("reachability of the tip-top action") {
  PartialAction pa = tip_top(fixtures::monoid_abc());
  const ReachabilityReport rep = reachability(pa);
  CHECK(rep.is_irreducible);
  CHECK(rep.essential_states.size() == 5);
  REQUIRE(rep.irreducible_components.size() == 1);
  CHECK(rep.irreducible_components[0].size() == 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) CHECK(rep.leads_to[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
}

TEST_CASE("reachability of a funnelled action") {
  // x feeds into the y <-> z cycle and never comes back
  Monoid m = fixtures::monoid_free2();
  PartialAction pa = build_partial_action(m, {"x", "y", "z"}, {0b11, 0b11, 0b11},
                                          {{1, 1}, {2, 2}, {1, 1}});
  const ReachabilityReport rep = reachability(pa);
  CHECK_FALSE(rep.is_irreducible);
  CHECK(rep.essential_states == std::vector<int>{1, 2});
  REQUIRE(rep.irreducible_components.size() == 1);
  CHECK(rep.irreducible_components[0] == std::vector<int>{1, 2});
  CHECK(rep.leads_to[0][1]);
  CHECK_FALSE(rep.leads_to[1][0]);
}

TEST_CASE("Rabati strips") {
  CHECK_THROWS_AS(rabati(2), DomainError);
  CHECK_THROWS_AS(rabati(3, true), DomainError);
  try {
    rabati(1);
    CHECK(false);
  } catch (const DomainError& e) {
    CHECK(e.kind() == "InvalidSize");
  }

  auto [m4, pa4] = rabati(4);
  CHECK(m4.alphabet_size() == 3);
  CHECK(m4.independent(m4.letter("a1"), m4.letter("a3")));
  CHECK_FALSE(m4.independent(m4.letter("a1"), m4.letter("a2")));
  CHECK(pa4.state_count() == 5);
  CHECK(reachability(pa4).is_irreducible);

  auto [m7, pa7] = rabati(7);
  CHECK(pa7.state_count() == 21);
  CHECK(reachability(pa7).is_irreducible);

  auto [m5c, pa5c] = rabati(5, true);
  CHECK(pa5c.state_count() == 11);
  // circular adjacency: a1 touches a2 and a5, commutes with a3 and a4
  CHECK(m5c.independent(m5c.letter("a1"), m5c.letter("a3")));
  CHECK(m5c.independent(m5c.letter("a1"), m5c.letter("a4")));
  CHECK_FALSE(m5c.independent(m5c.letter("a1"), m5c.letter("a5")));
  CHECK(reachability(pa5c).is_irreducible);
}
