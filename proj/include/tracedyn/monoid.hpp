#ifndef TRACEDYN_MONOID_HPP
#define TRACEDYN_MONOID_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tracedyn/errors.hpp"
#include "tracedyn/polynomial.hpp"

namespace tracedyn {

// A clique is a set of pairwise-independent letters, stored as a bitmask
// over letter indices. The empty clique is the unit trace.
using Clique = std::uint32_t;

inline int clique_size(Clique c) { return std::popcount(c); }

// Order: by size, then lexicographic on the sorted letter-index sequence.
// Gives every clique-indexed table a reproducible layout.
inline bool clique_less(Clique a, Clique b) {
  const int sa = clique_size(a), sb = clique_size(b);
  if (sa != sb) return sa < sb;
  while (a != 0 && b != 0) {
    const int la = std::countr_zero(a), lb = std::countr_zero(b);
    if (la != lb) return la < lb;
    a &= a - 1;
    b &= b - 1;
  }
  return false;
}

constexpr int kMaxAlphabet = 20;

// Trace monoid <letters | ab=ba for independent pairs>, with its clique
// set precomputed in canonical order (cliques[0] is the empty clique).
class Monoid {
public:
  Monoid(std::vector<std::string> letter_names,
         const std::vector<std::pair<std::string, std::string>>& independent_pairs) {
    if (letter_names.size() < 2)
      throw DomainError("AlphabetTooSmall", "need at least 2 letters, got " +
                                                std::to_string(letter_names.size()));
    if (letter_names.size() > kMaxAlphabet)
      throw DomainError("AlphabetTooLarge",
                        "at most " + std::to_string(kMaxAlphabet) + " letters supported");
    names_ = std::move(letter_names);
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (index_.count(names_[i]))
        throw DomainError("DuplicateLetter", "letter '" + names_[i] + "' repeated");
      index_[names_[i]] = static_cast<int>(i);
    }
    indep_.assign(names_.size(), 0);
    for (const auto& [u, v] : independent_pairs) {
      const int a = letter(u), b = letter(v);
      if (a == b) throw DomainError("ReflexivePair", "pair (" + u + "," + u + ") is reflexive");
      indep_[static_cast<std::size_t>(a)] |= Clique{1} << b;
      indep_[static_cast<std::size_t>(b)] |= Clique{1} << a;
    }
    enumerate_cliques();
  }

  int alphabet_size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& letter_names() const { return names_; }
  const std::string& letter_name(int a) const { return names_[static_cast<std::size_t>(a)]; }

  int letter(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw DomainError("UnknownLetter", "no letter named '" + name + "'");
    return it->second;
  }

  bool independent(int a, int b) const {
    return (indep_[static_cast<std::size_t>(a)] >> b) & 1u;
  }

  // Letters independent of a, as a mask (never contains a itself).
  Clique indep_mask(int a) const { return indep_[static_cast<std::size_t>(a)]; }

  // Letters dependent on a, including a itself.
  Clique dep_mask(int a) const { return full_mask() & ~indep_[static_cast<std::size_t>(a)]; }

  Clique full_mask() const { return (Clique{1} << alphabet_size()) - 1; }

  bool is_clique(Clique c) const {
    for (Clique rest = c; rest != 0;) {
      const int a = std::countr_zero(rest);
      rest &= rest - 1;
      if ((rest & ~indep_mask(a)) != 0) return false;
    }
    return true;
  }

  // c || c': all cross pairs independent (so c.c' is again a clique).
  bool parallel(Clique c, Clique d) const {
    for (Clique rest = d; rest != 0;) {
      const int b = std::countr_zero(rest);
      rest &= rest - 1;
      if ((c & ~indep_mask(b)) != 0) return false;
    }
    return c == 0 || d == 0 || is_clique(c | d);
  }

  // Cartier-Foata relation c -> c': every letter of c' depends on a letter of c.
  bool cf(Clique c, Clique d) const {
    for (Clique rest = d; rest != 0;) {
      const int b = std::countr_zero(rest);
      rest &= rest - 1;
      if ((c & dep_mask(b)) == 0) return false;
    }
    return true;
  }

  // All cliques, empty clique first; nonempty cliques are indices 1..n-1.
  const std::vector<Clique>& cliques() const { return cliques_; }
  int clique_count() const { return static_cast<int>(cliques_.size()); }

  int clique_index(Clique c) const {
    auto it = clique_idx_.find(c);
    if (it == clique_idx_.end()) throw DomainError("UnknownClique", "letter set is not a clique");
    return it->second;
  }

  std::string clique_name(Clique c) const {
    if (c == 0) return "1";
    std::string out;
    for (Clique rest = c; rest != 0; rest &= rest - 1) {
      if (!out.empty()) out += ".";
      out += names_[static_cast<std::size_t>(std::countr_zero(rest))];
    }
    return out;
  }

  // mu_M(t) = sum over cliques of (-1)^|c| t^|c|
  IntPoly mobius_polynomial() const {
    IntPoly p;
    for (Clique c : cliques_) {
      const int k = clique_size(c);
      p = p + IntPoly::monomial((k % 2 == 0) ? 1 : -1, k);
    }
    return p;
  }

private:
  void enumerate_cliques() {
    const Clique full = full_mask();
    for (Clique c = 0; c <= full; ++c)
      if (is_clique(c)) cliques_.push_back(c);
    std::sort(cliques_.begin(), cliques_.end(), clique_less);
    for (std::size_t i = 0; i < cliques_.size(); ++i)
      clique_idx_[cliques_[i]] = static_cast<int>(i);
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
  std::vector<Clique> indep_;
  std::vector<Clique> cliques_;
  std::unordered_map<Clique, int> clique_idx_;
};

// Simple Mobius transform on the clique lattice, values indexed by the
// monoid's canonical clique order:
//   h(c) = sum over cliques c' >= c of (-1)^(|c'|-|c|) f(c')
inline std::vector<double> mobius_transform(const Monoid& m, const std::vector<double>& f) {
  const auto& cs = m.cliques();
  std::vector<double> h(cs.size(), 0.0);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < cs.size(); ++j) {
      if ((cs[j] & cs[i]) != cs[i]) continue;  // need c' >= c
      const int d = clique_size(cs[j]) - clique_size(cs[i]);
      acc += (d % 2 == 0 ? 1.0 : -1.0) * f[j];
    }
    h[i] = acc;
  }
  return h;
}

}  // namespace tracedyn

#endif
