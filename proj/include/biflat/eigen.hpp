#pragma once

// Dense nonsymmetric eigenproblems for the small matrices this library
// meets (V-matrices up to n ~ 8, companion matrices of cubics).  Complex
// Hessenberg reduction followed by Wilkinson-shifted QR; eigenvectors by
// inverse iteration.

#include <complex>
#include <vector>

#include "biflat/common.hpp"

namespace biflat {

using Cplx = std::complex<double>;

class MatC {
 public:
  MatC() = default;
  explicit MatC(int n) : n_(n), a_(static_cast<size_t>(n) * n) {}

  Cplx& operator()(int i, int j) { return a_[i * n_ + j]; }
  Cplx operator()(int i, int j) const { return a_[i * n_ + j]; }
  int dim() const { return n_; }

 private:
  int n_ = 0;
  std::vector<Cplx> a_;
};

MatC to_complex(const MatD& m);

// Eigenvalues of a general complex matrix.  Order is deterministic
// (ascending real part, then imaginary part).
std::vector<Cplx> eigenvalues(MatC a);

// One eigenvector for the given eigenvalue via inverse iteration; the
// largest component is normalized to be real and positive.
std::vector<Cplx> eigenvector(const MatC& a, Cplx lambda);

struct EigenDecomposition {
  std::vector<Cplx> values;
  std::vector<std::vector<Cplx>> vectors;  // vectors[k] pairs with values[k]
  double residual = 0.0;                   // max_k |A v_k - lambda_k v_k|_inf
};

EigenDecomposition eigen_decompose(const MatD& m);

// Roots of x^3 + b2 x^2 + b1 x + b0 by QR on the companion matrix with a
// Newton polish.  A constant term of exactly zero is deflated first, so the
// root structure {0, double root} of x(x - r)^2 comes out exact.
std::vector<Cplx> cubic_roots(double b2, double b1, double b0);

}  // namespace biflat
