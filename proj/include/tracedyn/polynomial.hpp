#ifndef TRACEDYN_POLYNOMIAL_HPP
#define TRACEDYN_POLYNOMIAL_HPP

#include <cassert>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace tracedyn {

// Polynomial with exact integer coefficients, ascending degree.
// The zero polynomial is the empty coefficient list.
struct IntPoly {
  std::vector<long long> c;

  IntPoly() = default;
  explicit IntPoly(std::vector<long long> coeffs) : c(std::move(coeffs)) { trim(); }

  static IntPoly zero() { return IntPoly{}; }
  static IntPoly constant(long long k) { return IntPoly{std::vector<long long>{k}}; }
  // k * t^n
  static IntPoly monomial(long long k, int n) {
    std::vector<long long> v(static_cast<std::size_t>(n) + 1, 0);
    v.back() = k;
    return IntPoly{std::move(v)};
  }

  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }

  bool is_zero() const { return c.empty(); }
  // degree of zero polynomial is -1
  int degree() const { return static_cast<int>(c.size()) - 1; }

  long long coeff(int k) const {
    if (k < 0 || k >= static_cast<int>(c.size())) return 0;
    return c[static_cast<std::size_t>(k)];
  }

  double eval(double t) const {
    double r = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * t + static_cast<double>(*it);
    return r;
  }

  // Compensated Horner: tracks the rounding error of every step, giving
  // roughly twice the working precision. Needed to resolve the sign near
  // ill-conditioned roots (large coefficients, tiny residual).
  double eval_accurate(double t) const {
    if (c.empty()) return 0.0;
    double s = static_cast<double>(c.back());
    double comp = 0.0;
    for (auto it = c.rbegin() + 1; it != c.rend(); ++it) {
      const double prod = s * t;
      const double prod_err = std::fma(s, t, -prod);
      const double sum = prod + static_cast<double>(*it);
      const double tmp = sum - prod;
      const double sum_err = (prod - (sum - tmp)) + (static_cast<double>(*it) - tmp);
      s = sum;
      comp = comp * t + (prod_err + sum_err);
    }
    return s + comp;
  }

  bool operator==(const IntPoly& o) const { return c == o.c; }
  bool operator!=(const IntPoly& o) const { return c != o.c; }
};

inline IntPoly operator+(const IntPoly& a, const IntPoly& b) {
  std::vector<long long> r(std::max(a.c.size(), b.c.size()), 0);
  for (std::size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
  for (std::size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
  return IntPoly{std::move(r)};
}

inline IntPoly operator-(const IntPoly& a, const IntPoly& b) {
  std::vector<long long> r(std::max(a.c.size(), b.c.size()), 0);
  for (std::size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
  for (std::size_t i = 0; i < b.c.size(); ++i) r[i] -= b.c[i];
  return IntPoly{std::move(r)};
}

inline IntPoly operator-(const IntPoly& a) { return IntPoly::zero() - a; }

inline IntPoly operator*(const IntPoly& a, const IntPoly& b) {
  if (a.is_zero() || b.is_zero()) return IntPoly::zero();
  std::vector<long long> r(a.c.size() + b.c.size() - 1, 0);
  for (std::size_t i = 0; i < a.c.size(); ++i)
    for (std::size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
  return IntPoly{std::move(r)};
}

// Exact division: requires b | a in Z[t]; asserts on a nonzero remainder.
inline IntPoly divexact(const IntPoly& a, const IntPoly& b) {
  assert(!b.is_zero());
  if (a.is_zero()) return IntPoly::zero();
  assert(a.degree() >= b.degree());
  std::vector<long long> rem = a.c;
  std::vector<long long> q(static_cast<std::size_t>(a.degree() - b.degree()) + 1, 0);
  const long long lead = b.c.back();
  for (int k = a.degree() - b.degree(); k >= 0; --k) {
    const long long num = rem[static_cast<std::size_t>(k + b.degree())];
    assert(num % lead == 0);
    const long long qk = num / lead;
    q[static_cast<std::size_t>(k)] = qk;
    if (qk != 0)
      for (int j = 0; j <= b.degree(); ++j)
        rem[static_cast<std::size_t>(k + j)] -= qk * b.c[static_cast<std::size_t>(j)];
  }
  for (long long v : rem) {
    assert(v == 0);
    (void)v;
  }
  return IntPoly{std::move(q)};
}

using PolyMatrix = std::vector<std::vector<IntPoly>>;

// Fraction-free (Bareiss) determinant over Z[t]; exact.
inline IntPoly poly_determinant(PolyMatrix m) {
  const std::size_t n = m.size();
  if (n == 0) return IntPoly::constant(1);
  int sign = 1;
  IntPoly prev = IntPoly::constant(1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k].is_zero()) {
      std::size_t p = k + 1;
      while (p < n && m[p][k].is_zero()) ++p;
      if (p == n) return IntPoly::zero();
      std::swap(m[k], m[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        m[i][j] = divexact(m[i][j] * m[k][k] - m[i][k] * m[k][j], prev);
    prev = m[k][k];
  }
  IntPoly det = m[n - 1][n - 1];
  if (sign < 0) det = -det;
  return det;
}

// Signed ascending-term rendering, e.g. "1 -5t^2 +8t^4 -5t^6 +t^8".
inline std::string poly_to_string(const IntPoly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (int k = 0; k <= p.degree(); ++k) {
    const long long a = p.coeff(k);
    if (a == 0) continue;
    if (!out.empty()) out += a < 0 ? " -" : " +";
    else if (a < 0) out += "-";
    const long long mag = a < 0 ? -a : a;
    if (mag != 1 || k == 0) out += std::to_string(mag);
    if (k >= 1) out += "t";
    if (k >= 2) out += "^" + std::to_string(k);
  }
  return out;
}

}  // namespace tracedyn

#endif
