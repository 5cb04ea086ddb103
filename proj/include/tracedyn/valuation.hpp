#ifndef TRACEDYN_VALUATION_HPP
#define TRACEDYN_VALUATION_HPP

#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "tracedyn/action.hpp"
#include "tracedyn/errors.hpp"
#include "tracedyn/monoid.hpp"
#include "tracedyn/trace.hpp"

namespace tracedyn {

constexpr double kValidationTol = 1e-9;

// Per-state, per-letter parameter table lambda_alpha(a) on a completed
// action; the candidate parameters of a Markov measure.
struct FibredValuation {
  TotalAction action;
  std::vector<std::vector<double>> lambda;  // [state][letter]

  double param(int s, int a) const {
    if (s == kBottom) return 0.0;
    return lambda[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
  }
};

// f_alpha along an explicit representative word. Representative
// independence requires the concurrency equations to hold.
inline double eval_word(const FibredValuation& F, int state, const std::vector<int>& word) {
  double v = 1.0;
  int s = state;
  for (int a : word) {
    v *= F.param(s, a);
    s = F.action.apply(s, a);
  }
  return v;
}

// f_alpha(x), evaluated along the Cartier-Foata representative.
inline double eval_valuation(const FibredValuation& F, int state, const Trace& x) {
  return eval_word(F, state, x.word());
}

inline double eval_clique(const FibredValuation& F, int state, Clique c) {
  return eval_valuation(F, state, clique_trace(c));
}

inline bool support_respecting(const FibredValuation& F) {
  for (int s = 0; s < F.action.state_count(); ++s)
    for (int a = 0; a < F.action.monoid.alphabet_size(); ++a)
      if (F.action.apply(s, a) == kBottom && F.param(s, a) != 0.0) return false;
  return true;
}

struct ConcurrencyReport {
  bool pass = true;
  // (state, letter a, letter b) with lhs != rhs
  std::vector<std::tuple<int, int, int>> witnesses;
};

// Exhaustive check of lambda_alpha(a) lambda_{alpha.a}(b) =
// lambda_alpha(b) lambda_{alpha.b}(a) over all states and parallel pairs.
inline ConcurrencyReport check_concurrency(const FibredValuation& F,
                                           double tol = kValidationTol) {
  ConcurrencyReport rep;
  const Monoid& m = F.action.monoid;
  for (int s = 0; s < F.action.state_count(); ++s)
    for (int a = 0; a < m.alphabet_size(); ++a)
      for (int b = a + 1; b < m.alphabet_size(); ++b) {
        if (!m.independent(a, b)) continue;
        const double lhs = F.param(s, a) * F.param(F.action.apply(s, a), b);
        const double rhs = F.param(s, b) * F.param(F.action.apply(s, b), a);
        if (std::abs(lhs - rhs) > tol) {
          rep.pass = false;
          rep.witnesses.emplace_back(s, a, b);
        }
      }
  return rep;
}

struct MobiusReport {
  // h[state][clique index], clique indices in the monoid's canonical order
  std::vector<std::vector<double>> h;
  bool valid = true;
  // (state, clique index, offending value)
  std::vector<std::tuple<int, int, double>> violations;
};

// Per-state Mobius transform of f_alpha restricted to cliques; valid iff
// h_alpha(1) = 0 and h_alpha >= 0 on nonempty cliques, for every state.
inline MobiusReport mobius_report(const FibredValuation& F, double tol = kValidationTol) {
  const Monoid& m = F.action.monoid;
  MobiusReport rep;
  for (int s = 0; s < F.action.state_count(); ++s) {
    std::vector<double> f(static_cast<std::size_t>(m.clique_count()));
    for (int i = 0; i < m.clique_count(); ++i)
      f[static_cast<std::size_t>(i)] = eval_clique(F, s, m.cliques()[static_cast<std::size_t>(i)]);
    std::vector<double> h = mobius_transform(m, f);
    if (std::abs(h[0]) > tol) {
      rep.valid = false;
      rep.violations.emplace_back(s, 0, h[0]);
    }
    for (int i = 1; i < m.clique_count(); ++i)
      if (h[static_cast<std::size_t>(i)] < -tol) {
        rep.valid = false;
        rep.violations.emplace_back(s, i, h[static_cast<std::size_t>(i)]);
      }
    rep.h.push_back(std::move(h));
  }
  return rep;
}

// The Markov chain of states-and-cliques. Nodes are pairs
// (state, nonempty clique index); a row is all zeros when g vanishes
// (such nodes are unreachable under a valid valuation, but kept so the
// indexing stays stable).
struct ChainSpec {
  TotalAction action;
  std::vector<std::vector<double>> h;  // [state][clique index]
  std::vector<std::vector<double>> g;  // [state][clique index], 0 at index 0
  int start_state = 0;

  const Monoid& monoid() const { return action.monoid; }

  // initial law of (X_0, C_1): point mass at start_state times h|nonempty
  std::vector<double> initial() const {
    std::vector<double> law(h[static_cast<std::size_t>(start_state)]);
    law[0] = 0.0;
    return law;
  }

  // Transition row out of node (state, clique index): list of
  // ((state', clique index'), probability). Empty when the row is zero.
  std::vector<std::pair<std::pair<int, int>, double>> row(int state, int cidx) const {
    std::vector<std::pair<std::pair<int, int>, double>> out;
    const Monoid& m = action.monoid;
    const Clique c = m.cliques()[static_cast<std::size_t>(cidx)];
    const int next = act_clique(action, state, c);
    if (next == kBottom) return out;
    const double gv = g[static_cast<std::size_t>(next)][static_cast<std::size_t>(cidx)];
    if (gv == 0.0) return out;
    for (int j = 1; j < m.clique_count(); ++j) {
      if (!m.cf(c, m.cliques()[static_cast<std::size_t>(j)])) continue;
      const double p = h[static_cast<std::size_t>(next)][static_cast<std::size_t>(j)] / gv;
      if (p != 0.0) out.emplace_back(std::make_pair(next, j), p);
    }
    return out;
  }
};

inline ChainSpec chain_spec(const FibredValuation& F, int start_state,
                            double tol = kValidationTol) {
  MobiusReport rep = mobius_report(F, tol);
  if (!rep.valid)
    throw DomainError("InvalidValuation", "the fibred valuation is not Mobius");
  const Monoid& m = F.action.monoid;
  ChainSpec chain{F.action, std::move(rep.h), {}, start_state};
  for (int s = 0; s < F.action.state_count(); ++s) {
    std::vector<double> grow(static_cast<std::size_t>(m.clique_count()), 0.0);
    for (int i = 1; i < m.clique_count(); ++i) {
      double acc = 0.0;
      for (int j = 1; j < m.clique_count(); ++j)
        if (m.cf(m.cliques()[static_cast<std::size_t>(i)], m.cliques()[static_cast<std::size_t>(j)]))
          acc += chain.h[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)];
      grow[static_cast<std::size_t>(i)] = acc;
    }
    chain.g.push_back(std::move(grow));
  }
  // Lemma 1 forbids g = 0 with h > 0 at the same node; observing it means
  // the input table was not a valid valuation after all.
  for (int s = 0; s < F.action.state_count(); ++s)
    for (int i = 1; i < m.clique_count(); ++i) {
      const int next = act_clique(F.action, s, m.cliques()[static_cast<std::size_t>(i)]);
      if (next == kBottom) continue;
      if (chain.g[static_cast<std::size_t>(next)][static_cast<std::size_t>(i)] == 0.0 &&
          chain.h[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)] > tol)
        throw DomainError("InvalidValuation",
                          "charged transition with vanishing normalisation at state " +
                              F.action.states[static_cast<std::size_t>(s)]);
    }
  return chain;
}

// P_alpha(Y_n = x) = graded Mobius transform of f_alpha at x (Lemma 2).
inline double prefix_probability(const FibredValuation& F, int state, const Trace& x,
                                 double tol = kValidationTol) {
  if (!mobius_report(F, tol).valid)
    throw DomainError("InvalidValuation", "the fibred valuation is not Mobius");
  return graded_mobius_transform(
      F.action.monoid, [&](const Trace& y) { return eval_valuation(F, state, y); }, x);
}

// Residual of the identity f_beta(c) g_{beta.c}(c) = h_beta(c).
inline double lemma1_check(const FibredValuation& F, int beta, Clique c) {
  const Monoid& m = F.action.monoid;
  const int cidx = m.clique_index(c);
  std::vector<double> fb(static_cast<std::size_t>(m.clique_count()));
  const int alpha = act_clique(F.action, beta, c);
  double g = 0.0;
  if (alpha != kBottom) {
    std::vector<double> fa(static_cast<std::size_t>(m.clique_count()));
    for (int i = 0; i < m.clique_count(); ++i)
      fa[static_cast<std::size_t>(i)] =
          eval_clique(F, alpha, m.cliques()[static_cast<std::size_t>(i)]);
    std::vector<double> ha = mobius_transform(m, fa);
    for (int j = 1; j < m.clique_count(); ++j)
      if (m.cf(c, m.cliques()[static_cast<std::size_t>(j)])) g += ha[static_cast<std::size_t>(j)];
  }
  for (int i = 0; i < m.clique_count(); ++i)
    fb[static_cast<std::size_t>(i)] = eval_clique(F, beta, m.cliques()[static_cast<std::size_t>(i)]);
  std::vector<double> hb = mobius_transform(m, fb);
  return std::abs(eval_clique(F, beta, c) * g - hb[static_cast<std::size_t>(cidx)]);
}

}  // namespace tracedyn

#endif
