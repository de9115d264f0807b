#pragma once

// Rotation/Lame coefficient fields, residual evaluation for the augmented
// Darboux-Egorov and Lame systems, construction of the natural and dual
// connections, the V-matrix eigenproblem and flat-coordinate 1-forms.

#include <functional>
#include <optional>
#include <string>

#include "biflat/common.hpp"
#include "biflat/eigen.hpp"
#include "biflat/fd.hpp"
#include "biflat/geometry.hpp"

namespace biflat {

enum class PartialMode { Analytic, ForceFd };

struct RotationField {
  int n = 0;
  std::string provenance;
  double separation = kDefaultSeparation;
  double fd_scale = 1.0;  // interpolated fields want a coarser stencil
  std::function<double(int, int, const Point&)> value;       // beta_ij, i != j
  std::function<double(int, int, int, const Point&)> partial;  // d_k beta_ij

  double beta(int i, int j, const Point& p) const;
  double dbeta(int i, int j, int k, const Point& p, const FdScheme& fd,
               PartialMode mode = PartialMode::Analytic) const;
};

// Homogeneity tag: sign = -1 means E(H) = -d H, sign = +1 means E(H) = +d H.
struct Homogeneity {
  double degree = 0.0;
  int sign = -1;
};

struct LameField {
  int n = 0;
  std::string provenance;
  bool adjoint = false;  // field houses K_i of the adjoint system
  double floor = kLameFloor;
  double fd_scale = 1.0;
  std::optional<Homogeneity> homogeneity;
  std::function<double(int, const Point&)> value;          // H_i
  std::function<double(int, int, const Point&)> partial;   // d_j H_i

  double coeff(int i, const Point& p) const;
  double dcoeff(int i, int j, const Point& p, const FdScheme& fd,
                PartialMode mode = PartialMode::Analytic) const;
};

// ---------------------------------------------------------------------------
// Residuals of the defining systems.
// ---------------------------------------------------------------------------

struct DeResiduals {
  double ed1 = 0.0;  // max |d_k beta_ij - beta_ik beta_kj|, distinct i,j,k
  double ed2 = 0.0;  // max |sum_l d_l beta_ij|
  double ed3 = 0.0;  // max |sum_l u^l d_l beta_ij + beta_ij|
  double max_abs() const { return std::max(ed1, std::max(ed2, ed3)); }
};

DeResiduals de_residuals(const RotationField& beta, const Point& p,
                         const FdScheme& fd,
                         PartialMode mode = PartialMode::Analytic);

struct LameResiduals {
  double l1 = 0.0;  // max_{i != j} |d_j H_i - beta_ij H_j|
  double l2 = 0.0;  // max_i |sum_l d_l H_i|
  std::optional<double> l3;  // |sum_l u^l d_l H_i - sign * d * H_i|
};

LameResiduals lame_residuals(const RotationField& beta, const LameField& lame,
                             const Point& p, const FdScheme& fd,
                             PartialMode mode = PartialMode::Analytic);

// ---------------------------------------------------------------------------
// Connection builders.
// ---------------------------------------------------------------------------

Christoffel natural_connection(const RotationField& beta, const LameField& lame,
                               const Point& p);
Christoffel dual_connection(const RotationField& beta, const LameField& lame,
                            const Point& p);

ConnectionField natural_connection_field(const RotationField& beta,
                                         const LameField& lame);
ConnectionField dual_connection_field(const RotationField& beta,
                                      const LameField& lame);

// Gamma(1) + c, the deformed connection used by the second recursion scheme.
ConnectionField shifted_connection_field(const ConnectionField& conn,
                                         const ProductField& c);

// ---------------------------------------------------------------------------
// V-matrix and flat 1-forms.
// ---------------------------------------------------------------------------

struct VMatrixResult {
  MatD v;  // V_ij = (u^j - u^i) beta_ij, zero diagonal
  EigenDecomposition eigen;
  // max |Im lambda_k + Im lambda_sigma(k)| over the conjugate pairing.
  double conjugation_residual = 0.0;
};

VMatrixResult v_matrix(const RotationField& beta, const Point& p);

struct FlatFormResult {
  Vec omega;                 // omega_i = K_i H_i
  double closedness = 0.0;   // max_{i<j} |d_j omega_i - d_i omega_j|
  double covariant = 0.0;    // max |nabla_j omega_i| for the natural connection
};

FlatFormResult flat_form_and_closedness(const LameField& adjoint,
                                        const LameField& lame, const Point& p,
                                        const FdScheme& fd,
                                        PartialMode mode = PartialMode::Analytic);

}  // namespace biflat
