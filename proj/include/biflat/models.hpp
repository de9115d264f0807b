#pragma once

// Closed-form families: the epsilon-system in arbitrary dimension and the
// three n = 2 constructions (trig-log natural Lame coefficients, the dual
// family through a hypergeometric-type ODE, and the bi-flat power family).

#include <array>
#include <complex>

#include "biflat/darboux.hpp"

namespace biflat {

// ---------------------------------------------------------------------------
// epsilon-system, n >= 2.
//
//   H_i = prod_{l != i} |u^i - u^l|^{-eps}
//   beta_ij = eps * H_i / (H_j (u^i - u^j))
//
// The Lame coefficients satisfy E(H_i) = -(n-1) eps H_i, so the field is
// tagged with degree (n-1) eps under the E(H) = -dH convention.
// ---------------------------------------------------------------------------

struct EpsilonModel {
  int n = 3;
  double eps = 0.5;
  double separation = kDefaultSeparation;
};

RotationField epsilon_rotation(const EpsilonModel& m);
LameField epsilon_lame(const EpsilonModel& m);
// K_i = prod_{l != i} |u^i - u^l|^{+eps} solves the adjoint system.
LameField epsilon_adjoint(const EpsilonModel& m);
std::pair<RotationField, LameField> epsilon_fields(const EpsilonModel& m);

// Characteristic velocities X^i = u^i - eps * sum_k u^k.
VectorField epsilon_velocity(const EpsilonModel& m);

// ---------------------------------------------------------------------------
// n = 2 families.  beta_12 = C1/(u^1-u^2), beta_21 = C2/(u^1-u^2).
// ---------------------------------------------------------------------------

struct N2Model {
  double c1 = 1.0;
  double c2 = -4.0;
  double separation = kDefaultSeparation;
};

RotationField n2_rotation(const N2Model& m);

// Natural Lame family (solves L1, L2):
//   H_1 = a sin(s ln w) + b cos(s ln w),  s = sqrt(C1 C2), w = u^1 - u^2
//   H_2 = -sqrt(C2/C1) [a cos(s ln w) - b sin(s ln w)]
// Real mode requires C1 C2 > 0 and w > separation.
LameField n2_natural_lame(const N2Model& m, double a, double b);

// Same formulas over the complex field with principal branches, defined
// wherever w != 0; used when C1 C2 < 0 or u^1 < u^2.
std::array<std::complex<double>, 2> n2_natural_lame_complex(const N2Model& m,
                                                            double a, double b,
                                                            double u1,
                                                            double u2);

// Dual Lame family (solves L1 and E(H) = +dH): H_1 = f(u^2/u^1) (u^1)^d with
// f solving  f'' z (z-1)^2 + f' (z^2 - z - d (z-1)^2) + C1 C2 f = 0
// and H_2 = (u^1 - u^2) d_2 H_1 / C1.

// Right-hand side of the second-order equation in first-order form.
double n2_dual_fpp(const N2Model& m, double d, double z, double f, double fp);

// Closed form of f for the special case C1 = 1, C2 = -4.
struct N2SpecialDual {
  double d = 1.0;
  double a = 0.0;
  double b = 1.0;
};
double n2_special_f(const N2SpecialDual& s, double z);
double n2_special_fp(const N2SpecialDual& s, double z);
LameField n2_dual_lame_special(const N2Model& m, const N2SpecialDual& s);

// Numeric mode: integrate the ODE from (f, f')(z0) over [zlo, zhi].
struct N2OdeDual {
  double d = 1.0;
  double z0 = 0.5;
  double f0 = 1.0;
  double fp0 = 0.0;
  double zlo = 0.1;
  double zhi = 0.9;
  double tol = 1e-12;
  double pole_guard = 1e-3;
};
struct N2OdeSolution {
  double d = 0.0;
  std::vector<double> z;
  std::vector<double> f;
  std::vector<double> fp;
  std::vector<double> fpp;  // from the equation, for Hermite slopes
  double eval_f(double z) const;  // cubic Hermite
  double eval_fp(double z) const;
  double zlo() const { return z.front(); }
  double zhi() const { return z.back(); }
};
N2OdeSolution n2_dual_ode_solve(const N2Model& m, const N2OdeDual& opts);
LameField n2_dual_lame_ode(const N2Model& m, const N2OdeSolution& sol);

// Bi-flat family: H_i = D_i |u^1 - u^2|^{-d} with d^2 = -C1 C2 and the two
// constraints tying (D_1, D_2, d).  The connection entries come out as
// Gamma^1_{12} = -d/(u^2 - u^1), Gamma^2_{21} = +d/(u^2 - u^1).
struct N2Biflat {
  double degree = 0.0;  // d, under the E(H) = -dH convention
  double coef1 = 1.0;   // D_1
  double coef2 = 0.0;   // D_2
  RotationField beta;
  LameField lame;
};
N2Biflat n2_biflat(const N2Model& m, int degree_branch = +1);

double n2_biflat_expected_gamma112(const N2Biflat& b, const Point& p);
double n2_biflat_expected_gamma221(const N2Biflat& b, const Point& p);

}  // namespace biflat
