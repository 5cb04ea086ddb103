#ifndef TRACEDYN_UNIFORM_HPP
#define TRACEDYN_UNIFORM_HPP

#include <cmath>
#include <string>
#include <vector>

#include "tracedyn/action.hpp"
#include "tracedyn/errors.hpp"
#include "tracedyn/polynomial.hpp"
#include "tracedyn/trace.hpp"
#include "tracedyn/valuation.hpp"

namespace tracedyn {

// Matrix Mobius polynomial of an action: entry (alpha, beta) sums
// (-1)^|c| t^|c| over cliques c enabled at alpha with alpha.c = beta.
inline PolyMatrix mobius_matrix(const PartialAction& pa) {
  const TotalAction ta = complete_total(pa);
  const int n = pa.state_count();
  PolyMatrix mu(static_cast<std::size_t>(n),
                std::vector<IntPoly>(static_cast<std::size_t>(n), IntPoly::zero()));
  for (int s = 0; s < n; ++s)
    for (Clique c : pa.monoid.cliques()) {
      const int t = act_clique(ta, s, c);
      if (t == kBottom) continue;
      const int k = clique_size(c);
      mu[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] =
          mu[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] +
          IntPoly::monomial((k % 2 == 0) ? 1 : -1, k);
    }
  return mu;
}

inline IntPoly theta_polynomial(const PartialAction& pa) {
  return poly_determinant(mobius_matrix(pa));
}

// Smallest positive root in (0, 1]: sign scan then bisection. p(0) must be
// positive (theta has constant term 1). All sign decisions use the
// compensated evaluation: determinant polynomials can have an almost flat
// simple root whose residual sits below plain double rounding noise.
inline double smallest_positive_root(const IntPoly& p) {
  auto isolate = [&](int steps) -> double {
    double lo = 0.0;
    for (int i = 1; i <= steps; ++i) {
      const double t = static_cast<double>(i) / steps;
      const double v = p.eval_accurate(t);
      if (v == 0.0) return t;
      if (v < 0.0) {
        double hi = t;
        for (int it = 0; it < 80; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (p.eval_accurate(mid) > 0.0)
            lo = mid;
          else
            hi = mid;
        }
        return 0.5 * (lo + hi);
      }
      lo = t;
    }
    return -1.0;
  };
  double r = isolate(1024);
  if (r < 0.0) r = isolate(65536);
  if (r < 0.0)
    throw DomainError("NoRootInUnitInterval",
                      "no sign change of '" + poly_to_string(p) + "' found in (0, 1]");
  return r;
}

inline double characteristic_root(const PartialAction& pa) {
  if (!reachability(pa).is_irreducible)
    throw DomainError("NotIrreducible", "uniform-measure analysis needs an irreducible action");
  return smallest_positive_root(theta_polynomial(pa));
}

namespace detail {

// det of a dense matrix by LU with partial pivoting
inline double lu_determinant(std::vector<std::vector<double>> a) {
  const int n = static_cast<int>(a.size());
  double det = 1.0;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]) >
          std::abs(a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(k)]))
        piv = i;
    if (a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(k)] == 0.0) return 0.0;
    if (piv != k) {
      std::swap(a[static_cast<std::size_t>(piv)], a[static_cast<std::size_t>(k)]);
      det = -det;
    }
    det *= a[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
    for (int i = k + 1; i < n; ++i) {
      const double f = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] /
                       a[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
      for (int j = k + 1; j < n; ++j)
        a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -=
            f * a[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
    }
  }
  return det;
}

inline std::vector<std::vector<double>> eval_matrix(const PolyMatrix& mu, double t) {
  std::vector<std::vector<double>> a(mu.size(), std::vector<double>(mu.size(), 0.0));
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < mu.size(); ++j) a[i][j] = mu[i][j].eval(t);
  return a;
}

// Row sums of adj(A): entry alpha is sum over beta of the (beta, alpha)
// cofactor. At a singular A these sums span the right null space.
inline std::vector<double> adjugate_row_sums(const std::vector<std::vector<double>>& a) {
  const int n = static_cast<int>(a.size());
  std::vector<double> sums(static_cast<std::size_t>(n), 0.0);
  for (int col = 0; col < n; ++col) {
    for (int row = 0; row < n; ++row) {
      std::vector<std::vector<double>> minor;
      minor.reserve(static_cast<std::size_t>(n - 1));
      for (int i = 0; i < n; ++i) {
        if (i == row) continue;
        std::vector<double> r;
        r.reserve(static_cast<std::size_t>(n - 1));
        for (int j = 0; j < n; ++j)
          if (j != col) r.push_back(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        minor.push_back(std::move(r));
      }
      const double cof = (((row + col) % 2 == 0) ? 1.0 : -1.0) * lu_determinant(std::move(minor));
      sums[static_cast<std::size_t>(col)] += cof;  // adj(A)[col][row] = cofactor(row, col)
    }
  }
  return sums;
}

// Solve a x = b by LU with partial pivoting; a exactly singular pivot is
// replaced by a tiny value so the solve can still be used for inverse
// iteration on a (numerically) rank-deficient matrix.
inline std::vector<double> solve_linear(std::vector<std::vector<double>> a,
                                        std::vector<double> b) {
  const int n = static_cast<int>(a.size());
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]) >
          std::abs(a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(k)]))
        piv = i;
    if (piv != k) {
      std::swap(a[static_cast<std::size_t>(piv)], a[static_cast<std::size_t>(k)]);
      std::swap(b[static_cast<std::size_t>(piv)], b[static_cast<std::size_t>(k)]);
    }
    double d = a[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
    if (d == 0.0) d = a[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] = 1e-300;
    for (int i = k + 1; i < n; ++i) {
      const double f = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] / d;
      if (f == 0.0) continue;
      for (int j = k + 1; j < n; ++j)
        a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -=
            f * a[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
      b[static_cast<std::size_t>(i)] -= f * b[static_cast<std::size_t>(k)];
    }
  }
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double acc = b[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j)
      acc -= a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
             x[static_cast<std::size_t>(j)];
    x[static_cast<std::size_t>(i)] = acc / a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
  }
  return x;
}

}  // namespace detail

enum class CocycleMethod { adjugate, series_fallback };

struct CharacteristicData {
  double t0 = 0.0;
  IntPoly theta;
  std::vector<std::vector<double>> cocycle;  // Gamma[alpha][beta]
  CocycleMethod method = CocycleMethod::adjugate;
};

// State-indexed truncated growth series: counts[alpha][beta][k] is the
// number of traces of length k leading from alpha to beta. Brute force.
inline std::vector<std::vector<std::vector<long long>>> zeta_truncated(
    const PartialAction& pa, int K, int guard = kDefaultEnumerationGuard) {
  const TotalAction ta = complete_total(pa);
  const int n = pa.state_count();
  std::vector<std::vector<std::vector<long long>>> counts(
      static_cast<std::size_t>(n),
      std::vector<std::vector<long long>>(static_cast<std::size_t>(n),
                                          std::vector<long long>(static_cast<std::size_t>(K) + 1, 0)));
  for (const Trace& x : enumerate_traces(pa.monoid, K, guard))
    for (int s = 0; s < n; ++s) {
      const int t = act(ta, s, x);
      if (t != kBottom)
        ++counts[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)]
                [static_cast<std::size_t>(x.length())];
    }
  return counts;
}

inline CharacteristicData characteristic_data(const PartialAction& pa) {
  if (!reachability(pa).is_irreducible)
    throw DomainError("NotIrreducible", "uniform-measure analysis needs an irreducible action");
  CharacteristicData cd;
  const PolyMatrix mu = mobius_matrix(pa);
  cd.theta = poly_determinant(mu);
  cd.t0 = smallest_positive_root(cd.theta);
  const int n = pa.state_count();

  const auto mu_at_root = detail::eval_matrix(mu, cd.t0);
  std::vector<double> s = detail::adjugate_row_sums(mu_at_root);
  double scale = 0.0;
  for (double v : s) scale = std::max(scale, std::abs(v));
  bool usable = scale > 0.0;
  if (usable) {
    // the cofactor sums carry O(eps) absolute noise from the LU passes,
    // which matters when the determinant is flat at t0; a couple of rounds
    // of inverse iteration snap them onto the null direction
    for (int round = 0; round < 2; ++round) {
      std::vector<double> x = detail::solve_linear(mu_at_root, s);
      double xs = 0.0;
      bool finite = true;
      for (double v : x) {
        if (!std::isfinite(v)) finite = false;
        xs = std::max(xs, std::abs(v));
      }
      if (!finite || xs == 0.0) break;
      for (double& v : x) v /= xs;
      s = std::move(x);
    }
    scale = 0.0;
    for (double v : s) scale = std::max(scale, std::abs(v));
  }
  if (usable) {
    // orient along the dominant entry; a genuine cocycle is positive
    double pivot = 0.0;
    for (double v : s)
      if (std::abs(v) == scale) pivot = v;
    for (double& v : s) v /= pivot;
    for (double v : s)
      if (v < 1e-9) usable = false;
  }
  if (!usable) {
    // both row sums can vanish only with a shared higher-order pole;
    // fall back to ratios of the truncated growth series below t0
    cd.method = CocycleMethod::series_fallback;
    const auto counts = zeta_truncated(pa, kDefaultEnumerationGuard);
    auto z_at = [&](int a, double t) {
      double acc = 0.0;
      for (int b = 0; b < n; ++b) {
        double pw = 1.0;
        for (std::size_t k = 0; k < counts[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)].size(); ++k) {
          acc += static_cast<double>(
                     counts[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)][k]) *
                 pw;
          pw *= t;
        }
      }
      return acc;
    };
    const double e2 = 1e-4, e3 = 1e-5;
    std::vector<double> r2(static_cast<std::size_t>(n)), r3(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      r2[static_cast<std::size_t>(a)] = z_at(a, cd.t0 * (1.0 - e2));
      r3[static_cast<std::size_t>(a)] = z_at(a, cd.t0 * (1.0 - e3));
    }
    s.assign(static_cast<std::size_t>(n), 0.0);
    for (int a = 0; a < n; ++a) {
      const double v2 = r2[static_cast<std::size_t>(a)] / r2[0];
      const double v3 = r3[static_cast<std::size_t>(a)] / r3[0];
      s[static_cast<std::size_t>(a)] = v3 + (v3 - v2) * e3 / (e2 - e3);  // extrapolate to t0
      if (!(s[static_cast<std::size_t>(a)] > 0.0))
        throw DomainError("CocycleDegenerate", "cocycle ratios are not positive");
    }
  }
  cd.cocycle.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 1.0));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      cd.cocycle[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          a == b ? 1.0 : s[static_cast<std::size_t>(b)] / s[static_cast<std::size_t>(a)];
  return cd;
}

inline std::vector<std::vector<double>> parry_cocycle(const PartialAction& pa) {
  return characteristic_data(pa).cocycle;
}

// The uniform Markov valuation lambda_alpha(a) = t0 Gamma(alpha, alpha.a)
// on enabled letters (Theorem-5 measure of the action).
inline FibredValuation uniform_valuation(const PartialAction& pa) {
  const CharacteristicData cd = characteristic_data(pa);
  FibredValuation F{complete_total(pa), {}};
  for (int s = 0; s < pa.state_count(); ++s) {
    std::vector<double> row(static_cast<std::size_t>(pa.monoid.alphabet_size()), 0.0);
    for (int a = 0; a < pa.monoid.alphabet_size(); ++a)
      if (pa.is_enabled(s, a))
        row[static_cast<std::size_t>(a)] =
            cd.t0 *
            cd.cocycle[static_cast<std::size_t>(s)]
                      [static_cast<std::size_t>(pa.step[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)])];
    F.lambda.push_back(std::move(row));
  }
  if (!check_concurrency(F).pass || !mobius_report(F).valid)
    throw DomainError("ValidationFailed",
                      "uniform valuation failed validation (cocycle computation error)");
  return F;
}

// Coefficientwise check of mu(t) . Z(t) = I through degree K, in exact
// integers; returns the largest deviation (0 when the identity holds).
inline long long matrix_inversion_residual(const PartialAction& pa, int K,
                                           int guard = kDefaultEnumerationGuard) {
  const PolyMatrix mu = mobius_matrix(pa);
  const auto z = zeta_truncated(pa, K, guard);
  const int n = pa.state_count();
  long long worst = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int k = 0; k <= K; ++k) {
        long long acc = 0;
        for (int g = 0; g < n; ++g) {
          const IntPoly& p = mu[static_cast<std::size_t>(a)][static_cast<std::size_t>(g)];
          for (int j = 0; j <= std::min(k, p.degree()); ++j)
            acc += p.coeff(j) *
                   z[static_cast<std::size_t>(g)][static_cast<std::size_t>(b)]
                    [static_cast<std::size_t>(k - j)];
        }
        const long long want = (a == b && k == 0) ? 1 : 0;
        worst = std::max(worst, std::llabs(acc - want));
      }
  return worst;
}

// Truncated fibred convolution of the matrix Mobius polynomial against the
// zeta series: largest deviation from the identity over traces of length
// <= K. Zero when the inversion formula holds.
inline long long fibred_inversion_check(const PartialAction& pa, int K,
                                        int guard = kDefaultEnumerationGuard) {
  const TotalAction ta = complete_total(pa);
  long long worst = 0;
  const auto traces = enumerate_traces(pa.monoid, K, guard);
  for (int s = 0; s < pa.state_count(); ++s)
    for (const Trace& x : traces) {
      if (act(ta, s, x) == kBottom) continue;
      long long acc = 0;
      for (Clique c : pa.monoid.cliques()) {
        if (act_clique(ta, s, c) == kBottom) continue;
        if (!trace_leq(pa.monoid, clique_trace(c), x)) continue;
        acc += (clique_size(c) % 2 == 0) ? 1 : -1;
      }
      const long long want = x.is_unit() ? 1 : 0;
      worst = std::max(worst, std::llabs(acc - want));
    }
  return worst;
}

}  // namespace tracedyn

#endif
