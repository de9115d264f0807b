#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "biflat/eigen.hpp"
#include "biflat/rng.hpp"

using namespace biflat;

namespace {

MatD random_matrix(Rng& rng, int n) {
  MatD m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-2.0, 2.0);
  return m;
}

Cplx char_poly(const MatD& m, Cplx x) {
  // determinant of (M - x I) by complex LU, for cross-checking eigenvalues
  const int n = m.rows();
  MatC a = to_complex(m);
  for (int i = 0; i < n; ++i) a(i, i) -= x;
  Cplx det(1.0);
  for (int k = 0; k < n; ++k) {
    int pr = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(pr, k))) pr = i;
    if (std::abs(a(pr, k)) == 0.0) return Cplx(0.0);
    if (pr != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(pr, j));
      det = -det;
    }
    det *= a(k, k);
    for (int i = k + 1; i < n; ++i) {
      const Cplx f = a(i, k) / a(k, k);
      for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

}  // namespace

TEST_CASE("eigenvalues of the n=2 antidiagonal matrix") {
  // [[0, -C1], [C2, 0]] has lambda^2 = -C1 C2.
  MatD m(2, 2);
  m(0, 1) = -1.0;
  m(1, 0) = -4.0;
  const auto vals = eigenvalues(to_complex(m));
  CHECK(std::abs(vals[0] - Cplx(-2.0, 0.0)) < 1e-12);
  CHECK(std::abs(vals[1] - Cplx(2.0, 0.0)) < 1e-12);
}

TEST_CASE("complex pair") {
  MatD m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = -1.0;
  const auto vals = eigenvalues(to_complex(m));
  CHECK(std::abs(vals[0] - Cplx(0.0, -1.0)) < 1e-12);
  CHECK(std::abs(vals[1] - Cplx(0.0, 1.0)) < 1e-12);
}

TEST_CASE("random matrices: eigenvalues kill the characteristic polynomial "
          "and eigenvectors satisfy the eigen relation") {
  Rng rng(11);
  for (int n : {3, 4, 5, 6}) {
    for (int rep = 0; rep < 5; ++rep) {
      const MatD m = random_matrix(rng, n);
      const EigenDecomposition ed = eigen_decompose(m);
      REQUIRE(static_cast<int>(ed.values.size()) == n);
      CHECK(ed.residual < 1e-9);
      for (const Cplx& lam : ed.values) {
        // |p(lambda)| should be at machine scale relative to |p'| ~ gaps.
        CHECK(std::abs(char_poly(m, lam)) < 1e-9 * std::pow(4.0, n));
      }
      // Closure under conjugation for real input.
      for (const Cplx& lam : ed.values) {
        double best = 1e300;
        for (const Cplx& mu : ed.values)
          best = std::min(best, std::abs(std::conj(lam) - mu));
        CHECK(best < 1e-9);
      }
    }
  }
}

TEST_CASE("cubic roots: exact structure at zero constant term") {
  // x^3 - 2 r x^2 + r^2 x = x (x - r)^2
  const double r = 1.7;
  const auto roots = cubic_roots(-2.0 * r, r * r, 0.0);
  CHECK(roots[0] == Cplx(0.0, 0.0));
  CHECK(roots[1].real() == r);
  CHECK(roots[1].imag() == 0.0);
  CHECK(roots[2].real() == r);
}

TEST_CASE("cubic roots: back substitution for a generic cubic") {
  // x^3 - 6 x^2 + 9 x - 256
  const double b2 = -6.0, b1 = 9.0, b0 = -256.0;
  const auto roots = cubic_roots(b2, b1, b0);
  for (const Cplx& r : roots) {
    const Cplx p = ((r + b2) * r + b1) * r + b0;
    CHECK(std::abs(p) < 1e-9);
  }
  // Vieta: sum = 6, product = 256.
  CHECK(std::abs(roots[0] + roots[1] + roots[2] - 6.0) < 1e-10);
  CHECK(std::abs(roots[0] * roots[1] * roots[2] - 256.0) < 1e-9);
}

TEST_CASE("cubic roots: random coefficients satisfy vieta") {
  Rng rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    const double b2 = rng.uniform(-3.0, 3.0);
    const double b1 = rng.uniform(-3.0, 3.0);
    const double b0 = rng.uniform(-3.0, 3.0);
    const auto r = cubic_roots(b2, b1, b0);
    CHECK(std::abs(r[0] + r[1] + r[2] + b2) < 1e-10);
    CHECK(std::abs(r[0] * r[1] + r[0] * r[2] + r[1] * r[2] - b1) < 1e-9);
    CHECK(std::abs(r[0] * r[1] * r[2] + b0) < 1e-9);
  }
}
