#ifndef TRACEDYN_TESTS_FIXTURES_HPP
#define TRACEDYN_TESTS_FIXTURES_HPP

#include <cmath>
#include <string>
#include <vector>

#include "tracedyn/action.hpp"
#include "tracedyn/monoid.hpp"
#include "tracedyn/valuation.hpp"

namespace fixtures {

// <a,b,c | ac=ca>, the monoid of the 4-strip
inline tracedyn::Monoid monoid_abc() {
  return tracedyn::Monoid({"a", "b", "c"}, {{"a", "c"}});
}

// free monoid on two letters
inline tracedyn::Monoid monoid_free2() { return tracedyn::Monoid({"a", "b"}, {}); }

// the one-parameter symmetric Markov family on the 4-strip flip action:
// p = 1 - sqrt(q) on the edges out of the empty tiling, weight 1 on every
// deterministic return edge
inline tracedyn::FibredValuation symmetric_family(double q) {
  using namespace tracedyn;
  const double p = 1.0 - std::sqrt(q);
  Monoid m = monoid_abc();
  PartialAction pa = tip_top(m);
  const int a = m.letter("a"), b = m.letter("b"), c = m.letter("c");
  std::vector<std::vector<double>> lam(5, std::vector<double>(3, 0.0));
  auto s = [&](const std::string& name) {
    for (std::size_t i = 0; i < pa.states.size(); ++i)
      if (pa.states[i] == name) return static_cast<int>(i);
    throw DomainError("UnknownState", name);
  };
  lam[static_cast<std::size_t>(s("1"))][static_cast<std::size_t>(a)] = p;
  lam[static_cast<std::size_t>(s("1"))][static_cast<std::size_t>(b)] = q;
  lam[static_cast<std::size_t>(s("1"))][static_cast<std::size_t>(c)] = p;
  lam[static_cast<std::size_t>(s("a"))][static_cast<std::size_t>(a)] = 1.0;
  lam[static_cast<std::size_t>(s("a"))][static_cast<std::size_t>(c)] = p;
  lam[static_cast<std::size_t>(s("b"))][static_cast<std::size_t>(b)] = 1.0;
  lam[static_cast<std::size_t>(s("c"))][static_cast<std::size_t>(a)] = p;
  lam[static_cast<std::size_t>(s("c"))][static_cast<std::size_t>(c)] = 1.0;
  lam[static_cast<std::size_t>(s("a.c"))][static_cast<std::size_t>(a)] = 1.0;
  lam[static_cast<std::size_t>(s("a.c"))][static_cast<std::size_t>(c)] = 1.0;
  return FibredValuation{complete_total(pa), std::move(lam)};
}

inline int state_index(const tracedyn::PartialAction& pa, const std::string& name) {
  for (std::size_t i = 0; i < pa.states.size(); ++i)
    if (pa.states[i] == name) return static_cast<int>(i);
  throw tracedyn::DomainError("UnknownState", name);
}

}  // namespace fixtures

#endif
