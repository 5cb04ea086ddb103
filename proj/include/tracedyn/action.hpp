#ifndef TRACEDYN_ACTION_HPP
#define TRACEDYN_ACTION_HPP

#include <cstdlib>
#include <string>
#include <vector>

#include "tracedyn/errors.hpp"
#include "tracedyn/monoid.hpp"
#include "tracedyn/trace.hpp"

namespace tracedyn {

// The sink state of the completed total action.
constexpr int kBottom = -1;

// A partial action of a trace monoid on a finite labelled state set.
// enabled[s] is the mask of enabled letters at state s; step[s][a] is the
// successor, kBottom where a is disabled.
struct PartialAction {
  Monoid monoid;
  std::vector<std::string> states;
  std::vector<Clique> enabled;
  std::vector<std::vector<int>> step;

  int state_count() const { return static_cast<int>(states.size()); }
  bool is_enabled(int s, int a) const {
    return (enabled[static_cast<std::size_t>(s)] >> a) & 1u;
  }
};

// Completion of a partial action with the absorbing sink: every disabled
// letter maps to kBottom, which is absorbing.
struct TotalAction {
  Monoid monoid;
  std::vector<std::string> states;
  std::vector<std::vector<int>> step;  // [state][letter], kBottom allowed

  int state_count() const { return static_cast<int>(states.size()); }
  int apply(int s, int a) const {
    return s == kBottom ? kBottom : step[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
  }
};

namespace detail {
inline std::string triple(const PartialAction& pa, int s, int a, int b) {
  return "(" + pa.states[static_cast<std::size_t>(s)] + ", " + pa.monoid.letter_name(a) + ", " +
         pa.monoid.letter_name(b) + ")";
}
}  // namespace detail

// Exhaustive check of the partial-action axioms over all
// (state, letter, letter) triples. Throws on the first violation.
inline void validate_partial_action(const PartialAction& pa) {
  const Monoid& m = pa.monoid;
  const int n = pa.state_count();
  if (n == 0) throw DomainError("UnknownState", "state set is empty");
  if (static_cast<int>(pa.enabled.size()) != n || static_cast<int>(pa.step.size()) != n)
    throw DomainError("UnknownState", "enabled/step tables do not match the state set");
  for (int s = 0; s < n; ++s) {
    if (pa.enabled[static_cast<std::size_t>(s)] == 0)
      throw DomainError("EmptyEnabledSet",
                        "state " + pa.states[static_cast<std::size_t>(s)] + " enables no letter");
    if (static_cast<int>(pa.step[static_cast<std::size_t>(s)].size()) != m.alphabet_size())
      throw DomainError("UnknownLetter", "step row has wrong arity");
    for (int a = 0; a < m.alphabet_size(); ++a) {
      const int t = pa.step[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
      if (pa.is_enabled(s, a)) {
        if (t < 0 || t >= n)
          throw DomainError("UnknownState", "step target out of range at " +
                                                pa.states[static_cast<std::size_t>(s)]);
      } else if (t != kBottom) {
        throw DomainError("UnknownLetter", "step defined on a disabled letter at " +
                                               pa.states[static_cast<std::size_t>(s)]);
      }
    }
  }
  // lock/unlock axioms for parallel letter pairs
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < m.alphabet_size(); ++a) {
      if (!pa.is_enabled(s, a)) continue;
      const int sa = pa.step[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
      for (int b = 0; b < m.alphabet_size(); ++b) {
        if (!m.independent(a, b)) continue;
        if (pa.is_enabled(s, b)) {
          const int sb = pa.step[static_cast<std::size_t>(s)][static_cast<std::size_t>(b)];
          if (!pa.is_enabled(sa, b) || !pa.is_enabled(sb, a))
            throw DomainError("AxiomIViolated",
                              "parallel letter lost across a step at " + detail::triple(pa, s, a, b));
          if (pa.step[static_cast<std::size_t>(sa)][static_cast<std::size_t>(b)] !=
              pa.step[static_cast<std::size_t>(sb)][static_cast<std::size_t>(a)])
            throw DomainError("AxiomIViolated",
                              "parallel steps do not commute at " + detail::triple(pa, s, a, b));
        } else {
          if (pa.is_enabled(sa, b))
            throw DomainError("AxiomIIViolated", "parallel step unlocked a letter at " +
                                                     detail::triple(pa, s, a, b));
        }
      }
    }
  }
}

inline PartialAction build_partial_action(Monoid monoid, std::vector<std::string> states,
                                          std::vector<Clique> enabled,
                                          std::vector<std::vector<int>> step) {
  PartialAction pa{std::move(monoid), std::move(states), std::move(enabled), std::move(step)};
  validate_partial_action(pa);
  return pa;
}

inline TotalAction complete_total(const PartialAction& pa) {
  TotalAction ta{pa.monoid, pa.states, pa.step};
  return ta;
}

inline int act(const TotalAction& ta, int state, const Trace& x) {
  int s = state;
  for (int a : x.word()) {
    if (s == kBottom) return kBottom;
    s = ta.apply(s, a);
  }
  return s;
}

inline int act_clique(const TotalAction& ta, int state, Clique c) {
  int s = state;
  for (Clique rest = c; rest != 0; rest &= rest - 1) {
    if (s == kBottom) return kBottom;
    s = ta.apply(s, std::countr_zero(rest));
  }
  return s;
}

// F_alpha(x) = 1 iff alpha . x stays clear of the sink.
inline bool language_membership(const PartialAction& pa, int state, const Trace& x) {
  return act(complete_total(pa), state, x) != kBottom;
}

struct ReachabilityReport {
  std::vector<std::vector<bool>> leads_to;  // transitive closure, >= 1 step
  std::vector<int> essential_states;
  std::vector<std::vector<int>> irreducible_components;
  bool is_irreducible = false;
};

inline ReachabilityReport reachability(const PartialAction& pa) {
  const int n = pa.state_count();
  ReachabilityReport rep;
  rep.leads_to.assign(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < pa.monoid.alphabet_size(); ++a)
      if (pa.is_enabled(s, a))
        rep.leads_to[static_cast<std::size_t>(s)]
                    [static_cast<std::size_t>(pa.step[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)])] = true;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (rep.leads_to[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)])
        for (int j = 0; j < n; ++j)
          if (rep.leads_to[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)])
            rep.leads_to[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;

  auto leads = [&](int i, int j) { return rep.leads_to[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
  for (int s = 0; s < n; ++s) {
    bool essential = true;
    for (int t = 0; t < n; ++t)
      if (leads(s, t) && !leads(t, s)) essential = false;
    if (essential) rep.essential_states.push_back(s);
  }
  std::vector<bool> placed(static_cast<std::size_t>(n), false);
  for (int s : rep.essential_states) {
    if (placed[static_cast<std::size_t>(s)]) continue;
    std::vector<int> comp;
    for (int t = 0; t < n; ++t)
      if (leads(s, t)) {
        comp.push_back(t);
        placed[static_cast<std::size_t>(t)] = true;
      }
    rep.irreducible_components.push_back(comp);
  }
  rep.is_irreducible = rep.irreducible_components.size() == 1 &&
                       static_cast<int>(rep.irreducible_components[0].size()) == n;
  return rep;
}

// Tip-top action of a monoid on its own cliques: an enabled letter is
// removed when present in the current clique, appended when parallel.
inline PartialAction tip_top(const Monoid& m) {
  const auto& cs = m.cliques();
  PartialAction pa{m, {}, {}, {}};
  for (Clique c : cs) pa.states.push_back(m.clique_name(c));
  for (Clique c : cs) {
    Clique en = 0;
    std::vector<int> row(static_cast<std::size_t>(m.alphabet_size()), kBottom);
    for (int a = 0; a < m.alphabet_size(); ++a) {
      const Clique bit = Clique{1} << a;
      if (c & bit) {
        en |= bit;
        row[static_cast<std::size_t>(a)] = m.clique_index(c & ~bit);
      } else if (m.parallel(bit, c)) {
        en |= bit;
        row[static_cast<std::size_t>(a)] = m.clique_index(c | bit);
      }
    }
    pa.enabled.push_back(en);
    pa.step.push_back(std::move(row));
  }
  validate_partial_action(pa);
  return pa;
}

// Flip dynamics of the 2 x n Rabati strip: generators are flip positions,
// positions commute when the flipped domino pairs are disjoint. The state
// space is the clique set, acted on by tip-top.
inline std::pair<Monoid, PartialAction> rabati(int n, bool circular = false) {
  if (!circular && n < 3)
    throw DomainError("InvalidSize", "in-line Rabati strip needs n >= 3, got " + std::to_string(n));
  if (circular && n < 4)
    throw DomainError("InvalidSize", "circular Rabati strip needs n >= 4, got " + std::to_string(n));
  const int gens = circular ? n : n - 1;
  std::vector<std::string> names;
  for (int i = 1; i <= gens; ++i) names.push_back("a" + std::to_string(i));
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int i = 0; i < gens; ++i)
    for (int j = i + 1; j < gens; ++j) {
      const int d = j - i;
      const bool indep = circular ? std::min(d, n - d) >= 2 : d >= 2;
      if (indep) pairs.emplace_back(names[static_cast<std::size_t>(i)], names[static_cast<std::size_t>(j)]);
    }
  Monoid m(names, pairs);
  PartialAction pa = tip_top(m);
  return {std::move(m), std::move(pa)};
}

}  // namespace tracedyn

#endif
