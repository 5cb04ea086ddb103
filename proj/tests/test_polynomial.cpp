#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tracedyn/polynomial.hpp"
#include "tracedyn/sampler.hpp"

using namespace tracedyn;

namespace {

IntPoly random_poly(Rng& rng, int max_deg, long long max_abs) {
  std::vector<long long> c(rng.next() % static_cast<std::uint64_t>(max_deg + 1) + 1);
  for (auto& v : c)
    v = static_cast<long long>(rng.next() % static_cast<std::uint64_t>(2 * max_abs + 1)) - max_abs;
  return IntPoly{std::move(c)};
}

// textbook cofactor expansion along the first row, as an oracle
IntPoly cofactor_determinant(const PolyMatrix& m) {
  const std::size_t n = m.size();
  if (n == 0) return IntPoly::constant(1);
  if (n == 1) return m[0][0];
  IntPoly det;
  for (std::size_t j = 0; j < n; ++j) {
    if (m[0][j].is_zero()) continue;
    PolyMatrix minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<IntPoly> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(m[i][k]);
      minor.push_back(std::move(row));
    }
    const IntPoly term = m[0][j] * cofactor_determinant(minor);
    det = (j % 2 == 0) ? det + term : det - term;
  }
  return det;
}

}  // namespace

TEST_CASE("basic arithmetic and degree") {
  CHECK(IntPoly::zero().degree() == -1);
  CHECK(IntPoly::zero().is_zero());
  CHECK(IntPoly::constant(5).degree() == 0);
  CHECK(IntPoly::monomial(-2, 3).degree() == 3);
  CHECK(IntPoly{{1, 0, 0}}.degree() == 0);  // trailing zeros trimmed

  const IntPoly p{{1, -3, 1}};
  const IntPoly q{{0, 2}};
  CHECK((p + q) == IntPoly{{1, -1, 1}});
  CHECK((p - p).is_zero());
  CHECK((p * q) == IntPoly{{0, 2, -6, 2}});
  CHECK((-q) == IntPoly{{0, -2}});
  CHECK(p.coeff(1) == -3);
  CHECK(p.coeff(7) == 0);
  CHECK(p.eval(1.0) == doctest::Approx(-1.0));
}

TEST_CASE("string rendering") {
  CHECK(poly_to_string(IntPoly::zero()) == "0");
  CHECK(poly_to_string(IntPoly::constant(1)) == "1");
  CHECK(poly_to_string(IntPoly::constant(-4)) == "-4");
  CHECK(poly_to_string(IntPoly{{1, -3, 1}}) == "1 -3t +t^2");
  CHECK(poly_to_string(IntPoly{{1, 0, -5, 0, 8, 0, -5, 0, 1}}) == "1 -5t^2 +8t^4 -5t^6 +t^8");
  CHECK(poly_to_string(IntPoly{{0, 1}}) == "t");
  CHECK(poly_to_string(IntPoly{{0, -2}}) == "-2t");
}

TEST_CASE("exact division inverts multiplication") {
  Rng rng(7);
  for (int it = 0; it < 200; ++it) {
    IntPoly a = random_poly(rng, 5, 6);
    IntPoly b = random_poly(rng, 4, 6);
    if (b.is_zero()) continue;
    CHECK(divexact(a * b, b) == a);
  }
}

TEST_CASE("determinant of small hand matrices") {
  const IntPoly t = IntPoly::monomial(1, 1);
  PolyMatrix m{{IntPoly::constant(1), t}, {t, IntPoly::constant(1)}};
  CHECK(poly_determinant(m) == IntPoly{{1, 0, -1}});

  // upper triangular: product of the diagonal
  PolyMatrix tri{{IntPoly::constant(2), t, t},
                 {IntPoly::zero(), IntPoly{{1, 1}}, t},
                 {IntPoly::zero(), IntPoly::zero(), IntPoly{{0, 0, 3}}}};
  CHECK(poly_determinant(tri) == IntPoly::constant(2) * IntPoly{{1, 1}} * IntPoly{{0, 0, 3}});

  // equal rows: singular
  PolyMatrix sing{{t, t}, {t, t}};
  CHECK(poly_determinant(sing).is_zero());

  // leading zero pivot forces a row swap
  PolyMatrix swap{{IntPoly::zero(), t}, {t, IntPoly::constant(1)}};
  CHECK(poly_determinant(swap) == IntPoly{{0, 0, -1}});
}

TEST_CASE("fraction-free determinant matches cofactor expansion") {
  Rng rng(12345);
  for (int it = 0; it < 60; ++it) {
    const std::size_t n = 1 + rng.next() % 4;
    PolyMatrix m(n, std::vector<IntPoly>(n));
    for (auto& row : m)
      for (auto& e : row) e = random_poly(rng, 2, 3);
    CHECK(poly_determinant(m) == cofactor_determinant(m));
  }
}
