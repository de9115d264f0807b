#pragma once

// Core value types shared by every module: points in canonical coordinates,
// small dense tensors, error taxonomy and tolerance configuration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace biflat {

using Vec = std::vector<double>;

// ---------------------------------------------------------------------------
// Error taxonomy.  Evaluators throw; the CLI maps these to exit code 2.
// ---------------------------------------------------------------------------

// Coordinate collision, stencil leaving the admissible region, z out of range.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A Lame coefficient (or other required denominator) dropped below its floor.
struct DegeneracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation too close to a singular point of an ODE (z = 0 or z = 1).
struct PoleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A square-root radicand changed sign along the reconstruction range.
struct BranchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Solver failure (eigen iteration did not converge, step underflow, ...).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Conserved-quantity drift exceeded the configured bound.
struct DriftError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Model parameters violate a structural constraint.
struct InvalidModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed run manifest (unknown key, missing field, wrong type).
struct ManifestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Tolerances and admissibility.
// ---------------------------------------------------------------------------

struct Tolerances {
  double fd = 1e-6;         // finite-difference based residual checks
  double algebraic = 1e-10; // identities that hold up to roundoff
};

// Minimum pairwise coordinate gap; Christoffel entries scale like 1/gap.
inline constexpr double kDefaultSeparation = 1e-3;

// Floor for |H_i|; Lame coefficients appear in denominators.
inline constexpr double kLameFloor = 1e-12;

struct Point {
  Vec u;

  Point() = default;
  explicit Point(Vec coords) : u(std::move(coords)) {}
  Point(std::initializer_list<double> coords) : u(coords) {}

  int dim() const { return static_cast<int>(u.size()); }

  double max_abs() const {
    double m = 0.0;
    for (double x : u) m = std::max(m, std::abs(x));
    return m;
  }
};

inline double min_pair_gap(const Point& p) {
  const int n = p.dim();
  double g = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g = std::min(g, std::abs(p.u[i] - p.u[j]));
  return g;
}

inline double min_abs_coord(const Point& p) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : p.u) m = std::min(m, std::abs(x));
  return m;
}

inline bool admissible(const Point& p, double separation,
                       bool need_nonzero_coords) {
  if (p.dim() < 2) return false;
  if (min_pair_gap(p) < separation) return false;
  if (need_nonzero_coords && min_abs_coord(p) < separation) return false;
  for (double x : p.u)
    if (!std::isfinite(x)) return false;
  return true;
}

void require_admissible(const Point& p, double separation,
                        bool need_nonzero_coords);

// ---------------------------------------------------------------------------
// Small dense containers (row-major, value semantics).
// ---------------------------------------------------------------------------

class MatD {
 public:
  MatD() = default;
  MatD(int rows, int cols) : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

  double& operator()(int i, int j) { return a_[i * cols_ + j]; }
  double operator()(int i, int j) const { return a_[i * cols_ + j]; }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Vec& data() { return a_; }
  const Vec& data() const { return a_; }

 private:
  int rows_ = 0, cols_ = 0;
  Vec a_;
};

class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n), a_(static_cast<size_t>(n) * n * n, 0.0) {}

  double& operator()(int i, int j, int k) { return a_[(i * n_ + j) * n_ + k]; }
  double operator()(int i, int j, int k) const {
    return a_[(i * n_ + j) * n_ + k];
  }

  int dim() const { return n_; }
  Vec& data() { return a_; }
  const Vec& data() const { return a_; }

  double max_abs() const {
    double m = 0.0;
    for (double x : a_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  int n_ = 0;
  Vec a_;
};

class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n)
      : n_(n), a_(static_cast<size_t>(n) * n * n * n, 0.0) {}

  double& operator()(int i, int j, int k, int l) {
    return a_[((i * n_ + j) * n_ + k) * n_ + l];
  }
  double operator()(int i, int j, int k, int l) const {
    return a_[((i * n_ + j) * n_ + k) * n_ + l];
  }

  int dim() const { return n_; }
  const Vec& data() const { return a_; }

  double max_abs() const {
    double m = 0.0;
    for (double x : a_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  int n_ = 0;
  Vec a_;
};

// Connection coefficients Gamma^i_{jk} at a point, symmetric in (j, k).
struct Christoffel {
  Tensor3 gamma;

  Christoffel() = default;
  explicit Christoffel(int n) : gamma(n) {}

  int dim() const { return gamma.dim(); }
  double& at(int i, int j, int k) { return gamma(i, j, k); }
  double at(int i, int j, int k) const { return gamma(i, j, k); }
  double max_abs() const { return gamma.max_abs(); }

  double lower_symmetry_residual() const {
    const int n = dim();
    double m = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < j; ++k)
          m = std::max(m, std::abs(gamma(i, j, k) - gamma(i, k, j)));
    return m;
  }
};

}  // namespace biflat
