#pragma once

// The complete n = 3 pipeline: invariant-monitored integration of the
// six-function non-autonomous system, reconstruction of rotation
// coefficients on u-space, the forward map to the sigma function, the
// sigma-form residual, the quadrature-based inverse map and the parameter
// cubic.

#include <array>
#include <complex>

#include "biflat/darboux.hpp"
#include "biflat/eigen.hpp"

namespace biflat {
namespace pvi {

// Component order used everywhere (state vectors, CSV columns).
enum Pair : int { P12 = 0, P13, P21, P23, P31, P32 };

struct FState {
  double z = 0.0;
  std::array<double, 6> f{};  // (F12, F13, F21, F23, F31, F32)
};

struct Invariants {
  double minus_r2 = 0.0;  // F12 F21 + F13 F31 + F23 F32
  double dconst = 0.0;    // F23 F31 F12 - F13 F32 F21
};

Invariants invariants(const std::array<double, 6>& f);

// The six right-hand sides; throws PoleError near z = 0 or z = 1.
std::array<double, 6> rhs(const FState& s, double pole_guard = 1e-3);

struct IntegrateOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double max_step = 2e-3;
  double max_drift = 1e-9;
  double pole_guard = 1e-3;
};

struct TrajectoryN3 {
  std::vector<double> z;
  std::vector<std::array<double, 6>> f;
  std::vector<std::array<double, 6>> df;
  Invariants initial;
  double drift_minus_r2 = 0.0;
  double drift_dconst = 0.0;
  std::string method = "dormand-prince-5(4)";
  IntegrateOptions opts;

  double zlo() const { return std::min(z.front(), z.back()); }
  double zhi() const { return std::max(z.front(), z.back()); }
  std::array<double, 6> sample(double zq) const;  // cubic Hermite
};

// Adaptive integration with per-step invariant logging; drift beyond
// opts.max_drift raises DriftError with diagnostics.
TrajectoryN3 integrate(const FState& s0, double z1,
                       const IntegrateOptions& opts = {});

// Rotation coefficients on n = 3 points via
//   z(u) = (u^3 - u^1)/(u^2 - u^1),
// with the six couplings interpolated on the trajectory grid.
RotationField beta_from_trajectory(const TrajectoryN3& traj,
                                   double separation = kDefaultSeparation);
std::array<double, 6> beta_samples(const TrajectoryN3& traj, const Point& u);

// ---------------------------------------------------------------------------
// Forward map to the sigma function.
// ---------------------------------------------------------------------------

struct SigmaSample {
  double z = 0.0;
  double f = 0.0;
  double fp = 0.0;
  double fpp = 0.0;
};

struct SigmaData {
  std::vector<SigmaSample> samples;
  double r2 = 0.0;      // R^2 = -(F12 F21 + F13 F31 + F23 F32)
  double dconst = 0.0;  // D
  double consistency_residual = 0.0;  // |F23 F32 + f - (z-1) f'| over nodes
  std::array<Cplx, 3> v_squared{};    // roots of the parameter cubic
  double vieta_residual = 0.0;
  TrajectoryN3 source;  // retained for dense evaluation

  SigmaSample eval(double z) const;
};

SigmaData sigma_data_from_trajectory(const TrajectoryN3& traj);

// |z^2(z-1)^2 f''^2 + 4[f'(zf'-f)^2 - f'^2(zf'-f)]
//  + 4 R^2 f'(zf'-f) - 4 R^2 f'^2 - D^2|
double sigma_residual(double z, double f, double fp, double fpp, double r2,
                      double dconst);
double sigma_residual(const SigmaData& sd, double z);

// ---------------------------------------------------------------------------
// Inverse map.
// ---------------------------------------------------------------------------

struct ReconstructionConstants {
  double z0 = 0.0;
  double f0 = 0.0, fp0 = 0.0, fpp0 = 0.0;
  double r2 = 0.0, dconst = 0.0;
  Cplx alpha{}, beta{}, gamma{};
  std::array<Cplx, 6> c{};  // integration constants, Pair order
};

// Build the constant set from free constants A = C21, B = C31.
ReconstructionConstants make_reconstruction_constants(const SigmaData& sd,
                                                      double z0, Cplx a_const,
                                                      Cplx b_const);

// Solve (A, B) from the trajectory samples of F21 and F31 at z0 and verify
// the four remaining constants against the trajectory; the verification
// mismatch is written to *match_residual when given.
ReconstructionConstants solve_reconstruction_constants(
    const SigmaData& sd, double z0, double* match_residual = nullptr);

struct Reconstructed {
  std::vector<double> z;
  std::vector<std::array<double, 6>> f;
  double max_imag = 0.0;  // imaginary residue of the complex assembly
};

struct ReconstructOptions {
  double quad_tol = 1e-11;
  double radicand_floor = 1e-10;
  bool complex_mode = true;  // false additionally demands positive radicands
};

// The six couplings via square roots of (f', f - zf' - R^2, (z-1)f' - f)
// times exponentials of quadratures, on the sigma grid restricted to
// [zlo, zhi].
Reconstructed reconstruct_trajectory(const SigmaData& sd,
                                     const ReconstructionConstants& rc,
                                     double zlo, double zhi,
                                     const ReconstructOptions& opts = {});

// Roots of x^3 - 2 R^2 x^2 + R^4 x - D^2 plus the Vieta residual
// max(|sum - 2R^2|, |pair sum - R^4|, |product - D^2|).
std::array<Cplx, 3> painleve_parameters(double r2, double dconst,
                                        double* vieta_residual = nullptr);

// The index swap F_ij <-> F_ji; maps trajectories to trajectories and flips
// the sign of D.
std::array<double, 6> swap_indices(const std::array<double, 6>& f);

}  // namespace pvi
}  // namespace biflat
