#pragma once

// Pointwise tensor algebra in canonical coordinates: curvature of a
// connection, product-structure axioms, the Hertling-Manin condition,
// product/connection compatibility, parallel fields and the
// almost-equivalence criterion.

#include <functional>
#include <string>

#include "biflat/common.hpp"
#include "biflat/fd.hpp"

namespace biflat {

using ConnectionField = std::function<Christoffel(const Point&)>;

// ---------------------------------------------------------------------------
// Product structures.
// ---------------------------------------------------------------------------

struct ProductField {
  int n = 0;
  std::string provenance;
  std::function<Tensor3(const Point&)> structure;  // c^i_{jk}
  std::function<Vec(const Point&)> unit;   // e
  std::function<Vec(const Point&)> euler;  // E

  // d/du^dir of the structure constants by the central stencil; the
  // residual operations below are finite-difference oracles by contract.
  Tensor3 partial(const Point& p, int dir, const FdScheme& fd) const;
};

// c^i_{jk} = delta^i_j delta^i_k; unit e = (1,...,1); E^i = u^i.
ProductField canonical_product(int n);

// c*^i_{jk} = delta^i_j delta^i_k / u^i; unit is E itself.
ProductField dual_product(int n, double separation = kDefaultSeparation);

struct ProductAxiomResiduals {
  double commutativity = 0.0;
  double associativity = 0.0;
  double unit = 0.0;
};

ProductAxiomResiduals product_axioms(const ProductField& c, const Point& p);

// ---------------------------------------------------------------------------
// Vector fields with analytic Jacobians.
// ---------------------------------------------------------------------------

struct VectorField {
  std::string label;
  std::function<Vec(const Point&)> value;
  // Row-major Jacobian jac[i*n+j] = dX^i/du^j; empty -> finite differences.
  std::function<Vec(const Point&)> jacobian;
};

VectorField unit_vector_field(int n);   // e = (1,...,1)
VectorField euler_vector_field(int n);  // E^i = u^i

Vec vector_field_jacobian(const VectorField& x, const Point& p,
                          const FdScheme& fd);

// ---------------------------------------------------------------------------
// Residual operations.
// ---------------------------------------------------------------------------

// R^i_{jkl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj}
//           + Gamma^i_{ks} Gamma^s_{lj} - Gamma^i_{ls} Gamma^s_{kj},
// with the connection differentiated by the scheme's central stencil.
// Antisymmetry in (k, l) holds exactly by construction.
Tensor4 riemann_curvature(const ConnectionField& conn, const Point& p,
                          const FdScheme& fd);

double riemann_max_abs(const ConnectionField& conn, const Point& p,
                       const FdScheme& fd);

// max |R^i_{jkl} + R^i_{klj} + R^i_{ljk}| over all index tuples.
double first_bianchi_residual(const Tensor4& r);

// Max-abs over free indices of the Hertling-Manin expression.
double hertling_manin_residual(const ProductField& c, const Point& p,
                               const FdScheme& fd);

// max |nabla_l c^i_{jk} - nabla_j c^i_{lk}| with the full covariant
// derivative of the (1,2)-tensor.
double compatibility_residual(const ConnectionField& conn,
                              const ProductField& c, const Point& p,
                              const FdScheme& fd);

// max |d_j X^i + Gamma^i_{js} X^s| with the field's analytic Jacobian.
double parallel_vector_residual(const ConnectionField& conn,
                                const VectorField& x, const Point& p,
                                const FdScheme& fd);

// Canonical-coordinate criterion: max over i != j of
// |Gamma(1)^i_{ij} - Gamma(2)^i_{ij}|.
double almost_equivalence_residual(const ConnectionField& conn1,
                                   const ConnectionField& conn2,
                                   const Point& p);
double almost_equivalence_residual(const Christoffel& g1,
                                   const Christoffel& g2);

}  // namespace biflat
