#ifndef TRACEDYN_TRACE_HPP
#define TRACEDYN_TRACE_HPP

#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tracedyn/errors.hpp"
#include "tracedyn/monoid.hpp"

namespace tracedyn {

// A trace, stored as its Cartier-Foata normal form: the ordered list of
// nonempty cliques c_1 -> ... -> c_n. The empty list is the unit trace.
// Structural equality on the clique list is trace equality.
struct Trace {
  std::vector<Clique> cliques;

  int height() const { return static_cast<int>(cliques.size()); }
  int length() const {
    int n = 0;
    for (Clique c : cliques) n += clique_size(c);
    return n;
  }
  bool is_unit() const { return cliques.empty(); }

  // Letters of the canonical representative word, clique by clique.
  std::vector<int> word() const {
    std::vector<int> w;
    for (Clique c : cliques)
      for (Clique rest = c; rest != 0; rest &= rest - 1) w.push_back(std::countr_zero(rest));
    return w;
  }

  bool operator==(const Trace& o) const { return cliques == o.cliques; }
  bool operator!=(const Trace& o) const { return cliques != o.cliques; }
  bool operator<(const Trace& o) const { return cliques < o.cliques; }
};

// Sift one letter down through the heap: it falls past every clique it is
// independent of and joins the layer above the highest dependent one.
inline void push_letter(const Monoid& m, Trace& x, int a) {
  const Clique dep = m.dep_mask(a);
  int j = static_cast<int>(x.cliques.size()) - 1;
  while (j >= 0 && (x.cliques[static_cast<std::size_t>(j)] & dep) == 0) --j;
  if (j + 1 < static_cast<int>(x.cliques.size()))
    x.cliques[static_cast<std::size_t>(j + 1)] |= Clique{1} << a;
  else
    x.cliques.push_back(Clique{1} << a);
}

inline Trace normalize(const Monoid& m, const std::vector<int>& word) {
  Trace x;
  for (int a : word) {
    if (a < 0 || a >= m.alphabet_size())
      throw DomainError("UnknownLetter", "letter index out of range");
    push_letter(m, x, a);
  }
  return x;
}

inline Trace normalize(const Monoid& m, const std::vector<std::string>& labels) {
  std::vector<int> w;
  w.reserve(labels.size());
  for (const auto& s : labels) w.push_back(m.letter(s));
  return normalize(m, w);
}

inline Trace concat(const Monoid& m, const Trace& x, const Trace& y) {
  Trace z = x;
  for (int a : y.word()) push_letter(m, z, a);
  return z;
}

inline Trace clique_trace(Clique c) {
  Trace x;
  if (c != 0) x.cliques.push_back(c);
  return x;
}

inline std::string trace_to_string(const Monoid& m, const Trace& x) {
  if (x.is_unit()) return "1";
  std::string out;
  for (Clique c : x.cliques) out += "(" + m.clique_name(c) + ")";
  return out;
}

// Checks the normal-form invariant c_i -> c_{i+1} on consecutive cliques.
inline bool cf_valid(const Monoid& m, const Trace& x) {
  for (const Clique c : x.cliques)
    if (c == 0 || !m.is_clique(c)) return false;
  for (std::size_t i = 0; i + 1 < x.cliques.size(); ++i)
    if (!m.cf(x.cliques[i], x.cliques[i + 1])) return false;
  return true;
}

// Removes one minimal occurrence of letter a from y, if a is a minimal
// piece of the heap; left cancellation a^-1 . y.
inline std::optional<Trace> remove_minimal(const Monoid& m, const Trace& y, int a) {
  const Clique bit = Clique{1} << a;
  const Clique dep = m.dep_mask(a);
  for (std::size_t j = 0; j < y.cliques.size(); ++j) {
    if (y.cliques[j] & bit) {
      // cliques below j are untouched; letters at or above j re-sift
      Trace out;
      out.cliques.assign(y.cliques.begin(), y.cliques.begin() + static_cast<long>(j));
      for (std::size_t i = j; i < y.cliques.size(); ++i) {
        Clique c = y.cliques[i];
        if (i == j) c &= ~bit;
        for (Clique rest = c; rest != 0; rest &= rest - 1)
          push_letter(m, out, std::countr_zero(rest));
      }
      return out;
    }
    if (y.cliques[j] & dep) return std::nullopt;  // a blocked below: not minimal
  }
  return std::nullopt;
}

// x <= y in the left-divisibility order.
inline bool trace_leq(const Monoid& m, const Trace& x, const Trace& y) {
  Trace rest = y;
  for (int a : x.word()) {
    auto r = remove_minimal(m, rest, a);
    if (!r) return false;
    rest = *r;
  }
  return true;
}

struct OrderResult {
  bool leq = false;
  bool compatible = false;
  std::optional<Trace> lub;
};

// Divisibility, compatibility and least upper bound. The lub search is a
// breadth-first extension of x by letters of y, bounded by per-letter
// multiplicity max(count in x, count in y); the first upper bound found is
// minimal in length and hence the lub.
inline OrderResult trace_order(const Monoid& m, const Trace& x, const Trace& y) {
  OrderResult res;
  res.leq = trace_leq(m, x, y);
  if (res.leq) {
    res.compatible = true;
    res.lub = y;
    return res;
  }
  if (trace_leq(m, y, x)) {
    res.compatible = true;
    res.lub = x;
    return res;
  }
  std::vector<int> cap(static_cast<std::size_t>(m.alphabet_size()), 0);
  std::vector<int> cx(cap), cy(cap);
  for (int a : x.word()) ++cx[static_cast<std::size_t>(a)];
  for (int a : y.word()) ++cy[static_cast<std::size_t>(a)];
  for (std::size_t a = 0; a < cap.size(); ++a) cap[a] = std::max(cx[a], cy[a]);

  std::deque<Trace> frontier{x};
  std::set<std::vector<Clique>> seen{x.cliques};
  while (!frontier.empty()) {
    Trace z = frontier.front();
    frontier.pop_front();
    std::vector<int> cz(cap.size(), 0);
    for (int a : z.word()) ++cz[static_cast<std::size_t>(a)];
    for (int a = 0; a < m.alphabet_size(); ++a) {
      if (cz[static_cast<std::size_t>(a)] >= cap[static_cast<std::size_t>(a)]) continue;
      Trace w = z;
      push_letter(m, w, a);
      if (!seen.insert(w.cliques).second) continue;
      if (trace_leq(m, y, w)) {
        res.compatible = true;
        res.lub = w;
        return res;
      }
      frontier.push_back(w);
    }
  }
  return res;
}

constexpr int kDefaultEnumerationGuard = 12;

// All traces of length <= max_len, deduplicated by normal form, in
// breadth-first (length-graded) order starting with the unit.
inline std::vector<Trace> enumerate_traces(const Monoid& m, int max_len,
                                           int guard = kDefaultEnumerationGuard) {
  if (max_len > guard)
    throw DomainError("LimitExceeded", "enumeration of length " + std::to_string(max_len) +
                                           " exceeds guard " + std::to_string(guard));
  std::vector<Trace> out{Trace{}};
  std::set<std::vector<Clique>> seen{std::vector<Clique>{}};
  std::size_t lo = 0;
  for (int len = 1; len <= max_len; ++len) {
    const std::size_t hi = out.size();
    for (std::size_t i = lo; i < hi; ++i) {
      for (int a = 0; a < m.alphabet_size(); ++a) {
        Trace w = out[i];
        push_letter(m, w, a);
        if (seen.insert(w.cliques).second) out.push_back(w);
      }
    }
    lo = hi;
  }
  return out;
}

// #M(k) for k = 0..max_len, counted by walking Cartier-Foata clique
// sequences (each trace is visited exactly once, nothing is stored).
inline std::vector<long long> growth_coefficients(const Monoid& m, int max_len,
                                                  int guard = kDefaultEnumerationGuard) {
  if (max_len > guard)
    throw DomainError("LimitExceeded", "enumeration of length " + std::to_string(max_len) +
                                           " exceeds guard " + std::to_string(guard));
  std::vector<long long> counts(static_cast<std::size_t>(max_len) + 1, 0);
  counts[0] = 1;
  std::function<void(Clique, int)> rec = [&](Clique last, int used) {
    for (Clique c : m.cliques()) {
      if (c == 0) continue;
      const int sz = clique_size(c);
      if (used + sz > max_len) break;  // cliques are sorted by size
      if (last != 0 && !m.cf(last, c)) continue;
      ++counts[static_cast<std::size_t>(used + sz)];
      rec(c, used + sz);
    }
  };
  rec(0, 0);
  return counts;
}

// Truncation of 1 / mu(t) to K+1 coefficients; mu must have constant term 1.
inline std::vector<long long> series_inverse(const IntPoly& mu, int terms) {
  std::vector<long long> h(static_cast<std::size_t>(terms), 0);
  h[0] = 1;
  for (int k = 1; k < terms; ++k) {
    long long acc = 0;
    for (int j = 1; j <= std::min(k, mu.degree()); ++j)
      acc -= mu.coeff(j) * h[static_cast<std::size_t>(k - j)];
    h[static_cast<std::size_t>(k)] = acc;
  }
  return h;
}

// M(x): traces of the same height extending x. M(1) is the clique set.
inline std::vector<Trace> traces_above(const Monoid& m, const Trace& x) {
  std::vector<Trace> out;
  if (x.is_unit()) {
    for (Clique c : m.cliques()) out.push_back(clique_trace(c));
    return out;
  }
  const int n = x.height();
  // DFS over Cartier-Foata sequences of height exactly n
  std::vector<Clique> cur;
  std::function<void()> rec = [&]() {
    if (static_cast<int>(cur.size()) == n) {
      Trace y{cur};
      if (trace_leq(m, x, y)) out.push_back(y);
      return;
    }
    for (Clique c : m.cliques()) {
      if (c == 0) continue;
      if (!cur.empty() && !m.cf(cur.back(), c)) continue;
      cur.push_back(c);
      rec();
      cur.pop_back();
    }
  };
  rec();
  return out;
}

// Graded Mobius transform of f at x; for height <= 1 this is the simple
// transform, otherwise the last-clique sum over the prefix c_1...c_{n-1}.
inline double graded_mobius_transform(const Monoid& m, const std::function<double(const Trace&)>& f,
                                      const Trace& x) {
  Trace prefix;
  Clique last = 0;
  if (!x.is_unit()) {
    prefix.cliques.assign(x.cliques.begin(), x.cliques.end() - 1);
    last = x.cliques.back();
  }
  double acc = 0.0;
  for (Clique c : m.cliques()) {
    if ((c & last) != last) continue;  // need c >= c_n
    const int d = clique_size(c) - clique_size(last);
    acc += (d % 2 == 0 ? 1.0 : -1.0) * f(concat(m, prefix, clique_trace(c)));
  }
  return acc;
}

}  // namespace tracedyn

#endif
