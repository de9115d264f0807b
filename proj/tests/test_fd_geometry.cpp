#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "biflat/fd.hpp"
#include "biflat/geometry.hpp"
#include "biflat/rng.hpp"

using namespace biflat;

TEST_CASE("richardson fd is exact on cubics") {
  FdScheme fd;
  auto cubic = [](const Point& p) {
    const double x = p.u[0], y = p.u[1];
    return 2.0 * x * x * x - 3.0 * x * x * y + 5.0 * y * y * y - 7.0 * x + 1.0;
  };
  const Point p{1.3, -0.7};
  const double dx = fd.partial(cubic, p, 0);
  const double dy = fd.partial(cubic, p, 1);
  const double x = p.u[0], y = p.u[1];
  CHECK(std::abs(dx - (6.0 * x * x - 6.0 * x * y - 7.0)) < 1e-10);
  CHECK(std::abs(dy - (-3.0 * x * x + 15.0 * y * y)) < 1e-10);
}

TEST_CASE("richardson fd resolves smooth non-polynomial derivatives") {
  FdScheme fd;
  auto f = [](const Point& p) { return std::sin(p.u[0]) / (2.0 + p.u[1]); };
  const Point p{0.4, 1.1};
  CHECK(std::abs(fd.partial(f, p, 0) - std::cos(0.4) / 3.1) < 1e-12);
  CHECK(std::abs(fd.partial(f, p, 1) + std::sin(0.4) / (3.1 * 3.1)) < 1e-12);
}

TEST_CASE("zero connection has zero curvature") {
  const int n = 3;
  ConnectionField conn = [n](const Point&) { return Christoffel(n); };
  FdScheme fd;
  CHECK(riemann_max_abs(conn, Point{1.0, 2.0, 4.0}, fd) == 0.0);
}

TEST_CASE("curvature antisymmetry in the last index pair is exact") {
  // A deliberately curved connection.
  const int n = 3;
  ConnectionField conn = [n](const Point& p) {
    Christoffel g(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k <= j; ++k) {
          const double v = std::sin(p.u[i] + 2.0 * p.u[j]) * p.u[k];
          g.at(i, j, k) = v;
          g.at(i, k, j) = v;
        }
    return g;
  };
  FdScheme fd;
  const Tensor4 r = riemann_curvature(conn, Point{0.3, 1.1, 2.2}, fd);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          CHECK(r(i, j, k, l) == -r(i, j, l, k));
}

TEST_CASE("product axioms hold exactly for the two constant-form products") {
  const Point p{1.0, 2.0, 4.0};
  for (const ProductField& c : {canonical_product(3), dual_product(3)}) {
    const ProductAxiomResiduals ax = product_axioms(c, p);
    CHECK(ax.commutativity == 0.0);
    CHECK(ax.associativity == 0.0);
    CHECK(ax.unit == 0.0);
  }
}

TEST_CASE("hertling-manin residual") {
  FdScheme fd;
  const Point p{1.0, 2.0, 4.0};

  SUBCASE("canonical constant product gives zero") {
    CHECK(hertling_manin_residual(canonical_product(3), p, fd) == 0.0);
  }

  SUBCASE("dual product satisfies the condition") {
    CHECK(hertling_manin_residual(dual_product(3), p, fd) < 1e-8);
  }

  SUBCASE("a pushed-forward canonical product still satisfies it") {
    // The canonical product of auxiliary coordinates v(u), conjugated back
    // to u-space through a nonlinear diffeomorphism, is an F-manifold
    // product with dense non-constant structure constants.
    ProductField c;
    c.n = 3;
    auto jac = [](const Point& q) {
      MatD j(3, 3);  // dv/du for v = (u0 + .3 u1^2, u1 + .1 u0 u1, u2 + .2 u0^2)
      j(0, 0) = 1.0;
      j(0, 1) = 0.6 * q.u[1];
      j(1, 0) = 0.1 * q.u[1];
      j(1, 1) = 1.0 + 0.1 * q.u[0];
      j(2, 0) = 0.4 * q.u[0];
      j(2, 2) = 1.0;
      return j;
    };
    c.structure = [jac](const Point& q) {
      const MatD j = jac(q);
      // invert the 3x3 Jacobian
      MatD inv(3, 3);
      const double det =
          j(0, 0) * (j(1, 1) * j(2, 2) - j(1, 2) * j(2, 1)) -
          j(0, 1) * (j(1, 0) * j(2, 2) - j(1, 2) * j(2, 0)) +
          j(0, 2) * (j(1, 0) * j(2, 1) - j(1, 1) * j(2, 0));
      inv(0, 0) = (j(1, 1) * j(2, 2) - j(1, 2) * j(2, 1)) / det;
      inv(0, 1) = (j(0, 2) * j(2, 1) - j(0, 1) * j(2, 2)) / det;
      inv(0, 2) = (j(0, 1) * j(1, 2) - j(0, 2) * j(1, 1)) / det;
      inv(1, 0) = (j(1, 2) * j(2, 0) - j(1, 0) * j(2, 2)) / det;
      inv(1, 1) = (j(0, 0) * j(2, 2) - j(0, 2) * j(2, 0)) / det;
      inv(1, 2) = (j(0, 2) * j(1, 0) - j(0, 0) * j(1, 2)) / det;
      inv(2, 0) = (j(1, 0) * j(2, 1) - j(1, 1) * j(2, 0)) / det;
      inv(2, 1) = (j(0, 1) * j(2, 0) - j(0, 0) * j(2, 1)) / det;
      inv(2, 2) = (j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0)) / det;
      Tensor3 t(3);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          for (int cc = 0; cc < 3; ++cc) {
            double v = 0.0;
            for (int s = 0; s < 3; ++s) v += inv(a, s) * j(s, b) * j(s, cc);
            t(a, b, cc) = v;
          }
      return t;
    };
    CHECK(hertling_manin_residual(c, p, fd) < 1e-8);
  }

  SUBCASE("breaking associativity breaks the condition") {
    ProductField c = canonical_product(3);
    c.structure = [](const Point& q) {
      Tensor3 t(3);
      for (int i = 0; i < 3; ++i) t(i, i, i) = 1.0;
      // symmetric in the lower pair but not associative
      t(0, 1, 2) = t(0, 2, 1) = 0.3 * q.u[0];
      return t;
    };
    CHECK(hertling_manin_residual(c, p, fd) > 1e-4);
  }
}

TEST_CASE("compatibility residuals under the zero connection") {
  const int n = 3;
  ConnectionField zero = [n](const Point&) { return Christoffel(n); };
  FdScheme fd;

  // Diagonal products have totally symmetric partials, so the zero
  // connection is compatible with both constant-form products.
  CHECK(compatibility_residual(zero, dual_product(n), Point{1.0, 2.0, 4.0},
                               fd) < 1e-10);

  // Negative control: an off-diagonal entry with an asymmetric gradient.
  ProductField c = canonical_product(n);
  c.structure = [n](const Point& q) {
    Tensor3 t(n);
    for (int i = 0; i < n; ++i) t(i, i, i) = 1.0;
    t(0, 1, 2) = t(0, 2, 1) = 0.3 * q.u[0];
    return t;
  };
  CHECK(compatibility_residual(zero, c, Point{1.0, 2.0, 4.0}, fd) > 0.1);
}

TEST_CASE("parallel residuals under the zero connection") {
  const int n = 3;
  ConnectionField zero = [n](const Point&) { return Christoffel(n); };
  FdScheme fd;
  // dE = identity, so nabla E = I when Gamma = 0.
  CHECK(parallel_vector_residual(zero, euler_vector_field(n),
                                 Point{1.0, 2.0, 4.0}, fd) == 1.0);
  CHECK(parallel_vector_residual(zero, unit_vector_field(n),
                                 Point{1.0, 2.0, 4.0}, fd) == 0.0);
}

TEST_CASE("almost equivalence of a connection with itself is zero") {
  const int n = 3;
  ConnectionField conn = [n](const Point& p) {
    Christoffel g(n);
    g.at(0, 0, 1) = g.at(0, 1, 0) = 1.0 / (p.u[0] - p.u[1]);
    return g;
  };
  CHECK(almost_equivalence_residual(conn, conn, Point{1.0, 2.0, 4.0}) == 0.0);
}

TEST_CASE("admissibility guards") {
  CHECK_THROWS_AS(require_admissible(Point{1.0, 1.0 + 1e-5, 4.0},
                                     kDefaultSeparation, false),
                  DomainError);
  CHECK_THROWS_AS(
      require_admissible(Point{1e-6, 2.0, 4.0}, kDefaultSeparation, true),
      DomainError);
  CHECK_NOTHROW(
      require_admissible(Point{1e-6, 2.0, 4.0}, kDefaultSeparation, false));
}

TEST_CASE("seeded point sampling is deterministic and admissible") {
  Rng r1(7), r2(7);
  for (int k = 0; k < 50; ++k) {
    const Point a = sample_point(r1, 4, -2.0, 2.0, 0.1, true);
    const Point b = sample_point(r2, 4, -2.0, 2.0, 0.1, true);
    CHECK(a.u == b.u);
    CHECK(admissible(a, 0.1, true));
  }
}
