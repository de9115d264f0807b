#include "biflat/painleve.hpp"

#include <memory>
#include <sstream>

#include "biflat/ode.hpp"

namespace biflat {
namespace pvi {

Invariants invariants(const std::array<double, 6>& f) {
  Invariants out;
  out.minus_r2 = f[P12] * f[P21] + f[P13] * f[P31] + f[P23] * f[P32];
  out.dconst = f[P23] * f[P31] * f[P12] - f[P13] * f[P32] * f[P21];
  return out;
}

namespace {

void require_off_pole(double z, double guard) {
  if (std::abs(z) < guard) throw PoleError("evaluation too close to z = 0");
  if (std::abs(z - 1.0) < guard)
    throw PoleError("evaluation too close to z = 1");
}

std::array<double, 6> rhs_raw(double z, const std::array<double, 6>& f) {
  const double zm = z - 1.0;
  std::array<double, 6> d;
  d[P12] = f[P13] * f[P32] / (z * zm);
  d[P13] = -f[P12] * f[P23] / zm;
  d[P21] = f[P23] * f[P31] / (z * zm);
  d[P23] = f[P21] * f[P13] / z;
  d[P31] = -f[P32] * f[P21] / zm;
  d[P32] = f[P31] * f[P12] / z;
  return d;
}

}  // namespace

std::array<double, 6> rhs(const FState& s, double pole_guard) {
  require_off_pole(s.z, pole_guard);
  return rhs_raw(s.z, s.f);
}

TrajectoryN3 integrate(const FState& s0, double z1,
                       const IntegrateOptions& opts) {
  // The closed interval between z0 and z1 must avoid both pole guards.
  const double lo = std::min(s0.z, z1), hi = std::max(s0.z, z1);
  for (double pole : {0.0, 1.0}) {
    if (lo - opts.pole_guard < pole && pole < hi + opts.pole_guard)
      throw PoleError("integration range enters the guard of z = " +
                      std::to_string(static_cast<int>(pole)));
  }

  TrajectoryN3 traj;
  traj.opts = opts;
  traj.initial = invariants(s0.f);

  auto ode_rhs = [&](double z, const Vec& y, Vec& dy) {
    std::array<double, 6> f;
    std::copy_n(y.begin(), 6, f.begin());
    const std::array<double, 6> d = rhs_raw(z, f);
    std::copy_n(d.begin(), 6, dy.begin());
  };

  OdeOptions oo;
  oo.abs_tol = opts.abs_tol;
  oo.rel_tol = opts.rel_tol;
  oo.max_step = opts.max_step;

  auto monitor = [&](double z, const Vec& y) {
    std::array<double, 6> f;
    std::copy_n(y.begin(), 6, f.begin());
    const Invariants inv = invariants(f);
    const double d_mr2 = std::abs(inv.minus_r2 - traj.initial.minus_r2);
    const double d_d = std::abs(inv.dconst - traj.initial.dconst);
    traj.drift_minus_r2 = std::max(traj.drift_minus_r2, d_mr2);
    traj.drift_dconst = std::max(traj.drift_dconst, d_d);
    if (d_mr2 > opts.max_drift || d_d > opts.max_drift) {
      std::ostringstream msg;
      msg << "invariant drift exceeded " << opts.max_drift << " at z = " << z
          << " (|d mR2| = " << d_mr2 << ", |d D| = " << d_d << ")";
      throw DriftError(msg.str());
    }
    return true;
  };

  Vec y0(s0.f.begin(), s0.f.end());
  OdeDense run = integrate_rk45(ode_rhs, s0.z, z1, std::move(y0), oo, monitor);

  traj.z = std::move(run.t);
  traj.f.resize(run.y.size());
  traj.df.resize(run.dy.size());
  for (size_t k = 0; k < run.y.size(); ++k) {
    std::copy_n(run.y[k].begin(), 6, traj.f[k].begin());
    std::copy_n(run.dy[k].begin(), 6, traj.df[k].begin());
  }
  return traj;
}

std::array<double, 6> TrajectoryN3::sample(double zq) const {
  const bool ascending = z.back() >= z.front();
  // hermite_eval wants an ascending grid; build index mapping on the fly.
  std::array<double, 6> out;
  if (ascending) {
    for (int c = 0; c < 6; ++c) {
      std::vector<double> ys(z.size()), ds(z.size());
      for (size_t k = 0; k < z.size(); ++k) {
        ys[k] = f[k][c];
        ds[k] = df[k][c];
      }
      out[c] = hermite_eval(z, ys, ds, zq);
    }
  } else {
    std::vector<double> zs(z.rbegin(), z.rend());
    for (int c = 0; c < 6; ++c) {
      std::vector<double> ys(z.size()), ds(z.size());
      for (size_t k = 0; k < z.size(); ++k) {
        const size_t q = z.size() - 1 - k;
        ys[k] = f[q][c];
        ds[k] = df[q][c];
      }
      out[c] = hermite_eval(zs, ys, ds, zq);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// beta on u-space.
// ---------------------------------------------------------------------------

std::array<double, 6> beta_samples(const TrajectoryN3& traj, const Point& u) {
  if (u.dim() != 3) throw DomainError("trajectory beta needs n = 3 points");
  const double d21 = u.u[1] - u.u[0];
  const double d31 = u.u[2] - u.u[0];
  const double d32 = u.u[2] - u.u[1];
  const double z = d31 / d21;
  const std::array<double, 6> f = traj.sample(z);
  std::array<double, 6> b;
  b[P12] = f[P12] / d21;
  b[P21] = f[P21] / d21;
  b[P32] = f[P32] / d32;
  b[P23] = f[P23] / d32;
  b[P13] = f[P13] / d31;
  b[P31] = f[P31] / d31;
  return b;
}

RotationField beta_from_trajectory(const TrajectoryN3& traj,
                                   double separation) {
  auto shared = std::make_shared<TrajectoryN3>(traj);
  RotationField field;
  field.n = 3;
  field.separation = separation;
  field.fd_scale = 10.0;  // interpolated values want a coarser stencil
  field.provenance = "trajectory";
  field.value = [shared, separation](int i, int j, const Point& u) {
    require_admissible(u, separation, false);
    const std::array<double, 6> b = beta_samples(*shared, u);
    static constexpr int kIndex[3][3] = {
        {-1, P12, P13}, {P21, -1, P23}, {P31, P32, -1}};
    return b[kIndex[i][j]];
  };
  return field;
}

// ---------------------------------------------------------------------------
// Sigma data.
// ---------------------------------------------------------------------------

namespace {

SigmaSample sigma_from_f(double z, const std::array<double, 6>& f, double r2) {
  SigmaSample s;
  s.z = z;
  s.fp = f[P12] * f[P21];
  s.f = z * s.fp + f[P13] * f[P31] + r2;
  s.fpp = (f[P23] * f[P31] * f[P12] + f[P13] * f[P32] * f[P21]) /
          (z * (z - 1.0));
  return s;
}

}  // namespace

SigmaData sigma_data_from_trajectory(const TrajectoryN3& traj) {
  SigmaData sd;
  sd.source = traj;
  sd.r2 = -traj.initial.minus_r2;
  sd.dconst = traj.initial.dconst;
  sd.samples.reserve(traj.z.size());
  for (size_t k = 0; k < traj.z.size(); ++k) {
    const SigmaSample s = sigma_from_f(traj.z[k], traj.f[k], sd.r2);
    sd.samples.push_back(s);
    const double res =
        std::abs(traj.f[k][P23] * traj.f[k][P32] + s.f - (s.z - 1.0) * s.fp);
    sd.consistency_residual = std::max(sd.consistency_residual, res);
  }
  sd.v_squared = painleve_parameters(sd.r2, sd.dconst, &sd.vieta_residual);
  return sd;
}

SigmaSample SigmaData::eval(double z) const {
  return sigma_from_f(z, source.sample(z), r2);
}

double sigma_residual(double z, double f, double fp, double fpp, double r2,
                      double dconst) {
  const double zm = z - 1.0;
  const double g = z * fp - f;
  return std::abs(z * z * zm * zm * fpp * fpp + 4.0 * (fp * g * g - fp * fp * g) +
                  4.0 * r2 * fp * g - 4.0 * r2 * fp * fp - dconst * dconst);
}

double sigma_residual(const SigmaData& sd, double z) {
  const SigmaSample s = sd.eval(z);
  return sigma_residual(s.z, s.f, s.fp, s.fpp, sd.r2, sd.dconst);
}

// ---------------------------------------------------------------------------
// Reconstruction.
// ---------------------------------------------------------------------------

namespace {

struct Radicands {
  double p = 0.0;  // f'
  double q = 0.0;  // f - z f' - R^2
  double s = 0.0;  // (z-1) f' - f
};

Radicands radicands_at(const SigmaData& sd, double z) {
  const SigmaSample smp = sd.eval(z);
  Radicands r;
  r.p = smp.fp;
  r.q = smp.f - z * smp.fp - sd.r2;
  r.s = (z - 1.0) * smp.fp - smp.f;
  return r;
}

}  // namespace

ReconstructionConstants make_reconstruction_constants(const SigmaData& sd,
                                                      double z0, Cplx a_const,
                                                      Cplx b_const) {
  ReconstructionConstants rc;
  rc.z0 = z0;
  const SigmaSample s0 = sd.eval(z0);
  rc.f0 = s0.f;
  rc.fp0 = s0.fp;
  rc.fpp0 = s0.fpp;
  rc.r2 = sd.r2;
  rc.dconst = sd.dconst;

  const double core = rc.fpp0 * z0 * (z0 - 1.0);
  const Radicands rad = radicands_at(sd, z0);
  const Cplx arg_alpha(core - rc.dconst, 0.0);
  const Cplx arg_beta(core + rc.dconst, 0.0);
  const Cplx arg_gamma =
      2.0 * std::sqrt(Cplx(rad.p, 0.0) * Cplx(rad.q, 0.0) * Cplx(rad.s, 0.0));
  const double scale = std::abs(core) + std::abs(rc.dconst) + 1e-30;
  if (std::abs(arg_alpha) < 1e-14 * scale ||
      std::abs(arg_beta) < 1e-14 * scale || std::abs(arg_gamma) == 0.0)
    throw DegeneracyError(
        "reconstruction constants degenerate: z0(z0-1) f'' = +-D "
        "or a vanishing radicand at z0");

  rc.alpha = std::log(arg_alpha);
  rc.beta = std::log(arg_beta);
  rc.gamma = std::log(arg_gamma);

  rc.c[P21] = a_const;
  rc.c[P31] = b_const;
  rc.c[P32] = b_const - a_const + rc.alpha - rc.gamma;
  rc.c[P13] = -b_const + rc.alpha + rc.beta - 2.0 * rc.gamma;
  rc.c[P23] = a_const - b_const + rc.beta - rc.gamma;
  rc.c[P12] = -a_const + rc.alpha + rc.beta - 2.0 * rc.gamma;
  return rc;
}

ReconstructionConstants solve_reconstruction_constants(const SigmaData& sd,
                                                       double z0,
                                                       double* match_residual) {
  const std::array<double, 6> f0 = sd.source.sample(z0);
  const Radicands rad = radicands_at(sd, z0);
  const Cplx sqrt_p = std::sqrt(Cplx(rad.p, 0.0));
  const Cplx sqrt_q = std::sqrt(Cplx(rad.q, 0.0));
  const Cplx sqrt_s = std::sqrt(Cplx(rad.s, 0.0));
  if (std::abs(sqrt_p) == 0.0 || std::abs(sqrt_q) == 0.0 ||
      std::abs(sqrt_s) == 0.0)
    throw DegeneracyError("a radicand vanishes at z0");

  const Cplx a_const = std::log(Cplx(f0[P21], 0.0) / sqrt_p);
  const Cplx b_const = std::log(Cplx(f0[P31], 0.0) / sqrt_q);
  ReconstructionConstants rc =
      make_reconstruction_constants(sd, z0, a_const, b_const);

  // The remaining four constants are determined; check them against the
  // trajectory samples at z0 (quadratures vanish there).
  double mismatch = 0.0;
  const std::array<Cplx, 6> roots{sqrt_p, sqrt_q, sqrt_p,
                                  sqrt_s, sqrt_q, sqrt_s};
  for (int k : {P12, P13, P23, P32}) {
    const Cplx predicted = roots[k] * std::exp(rc.c[k]);
    mismatch = std::max(mismatch, std::abs(predicted - Cplx(f0[k], 0.0)));
  }
  if (match_residual) *match_residual = mismatch;
  return rc;
}

Reconstructed reconstruct_trajectory(const SigmaData& sd,
                                     const ReconstructionConstants& rc,
                                     double zlo, double zhi,
                                     const ReconstructOptions& opts) {
  if (!(zlo < zhi)) throw DomainError("reconstruct: need zlo < zhi");
  if (rc.z0 < zlo || rc.z0 > zhi)
    throw DomainError("reconstruct: z0 must lie inside [zlo, zhi]");

  // Collect output nodes: sigma grid restricted to the range, plus z0.
  std::vector<double> grid;
  for (const SigmaSample& s : sd.samples)
    if (s.z >= zlo - 1e-12 && s.z <= zhi + 1e-12) grid.push_back(s.z);
  grid.push_back(rc.z0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) {
                           return std::abs(a - b) < 1e-13;
                         }),
             grid.end());
  if (grid.size() < 2) throw DomainError("reconstruct: empty range");

  // Branch guard: each radicand must keep one sign over the range.
  {
    int sign_p = 0, sign_q = 0, sign_s = 0;
    for (double z : grid) {
      const Radicands r = radicands_at(sd, z);
      const double floor = opts.radicand_floor;
      if (std::abs(r.p) < floor || std::abs(r.q) < floor ||
          std::abs(r.s) < floor)
        throw BranchError("radicand vanishes inside the reconstruction range");
      auto track = [](int& sgn, double v) {
        const int s = v > 0.0 ? 1 : -1;
        if (sgn == 0) sgn = s;
        return sgn == s;
      };
      if (!track(sign_p, r.p) || !track(sign_q, r.q) || !track(sign_s, r.s))
        throw BranchError("radicand changes sign inside the range");
    }
    if (!opts.complex_mode && (sign_p < 0 || sign_q < 0 || sign_s < 0))
      throw BranchError(
          "negative radicand: complex continuation disabled in real mode");
  }

  // Quadrature integrands (real; the constants carry any phases).
  auto integrand_p = [&](double t) {
    return rc.dconst / (2.0 * t * (t - 1.0) * radicands_at(sd, t).p);
  };
  auto integrand_q = [&](double t) {
    return rc.dconst / (2.0 * (t - 1.0) * radicands_at(sd, t).q);
  };
  auto integrand_s = [&](double t) {
    return rc.dconst / (2.0 * t * radicands_at(sd, t).s);
  };

  // Cumulative quadratures from z0 along the grid in both directions.
  const size_t npts = grid.size();
  std::vector<double> quad_p(npts, 0.0), quad_q(npts, 0.0), quad_s(npts, 0.0);
  size_t i0 = 0;
  for (size_t k = 0; k < npts; ++k)
    if (std::abs(grid[k] - rc.z0) < 1e-12) i0 = k;
  for (size_t k = i0 + 1; k < npts; ++k) {
    quad_p[k] = quad_p[k - 1] +
                adaptive_simpson(integrand_p, grid[k - 1], grid[k], opts.quad_tol);
    quad_q[k] = quad_q[k - 1] +
                adaptive_simpson(integrand_q, grid[k - 1], grid[k], opts.quad_tol);
    quad_s[k] = quad_s[k - 1] +
                adaptive_simpson(integrand_s, grid[k - 1], grid[k], opts.quad_tol);
  }
  for (size_t k = i0; k-- > 0;) {
    quad_p[k] = quad_p[k + 1] +
                adaptive_simpson(integrand_p, grid[k + 1], grid[k], opts.quad_tol);
    quad_q[k] = quad_q[k + 1] +
                adaptive_simpson(integrand_q, grid[k + 1], grid[k], opts.quad_tol);
    quad_s[k] = quad_s[k + 1] +
                adaptive_simpson(integrand_s, grid[k + 1], grid[k], opts.quad_tol);
  }

  Reconstructed out;
  out.z = grid;
  out.f.resize(npts);
  for (size_t k = 0; k < npts; ++k) {
    const Radicands r = radicands_at(sd, grid[k]);
    const Cplx sqrt_p = std::sqrt(Cplx(r.p, 0.0));
    const Cplx sqrt_q = std::sqrt(Cplx(r.q, 0.0));
    const Cplx sqrt_s = std::sqrt(Cplx(r.s, 0.0));
    const std::array<Cplx, 6> vals{
        sqrt_p * std::exp(-quad_p[k] + rc.c[P12]),
        sqrt_q * std::exp(-quad_q[k] + rc.c[P13]),
        sqrt_p * std::exp(+quad_p[k] + rc.c[P21]),
        sqrt_s * std::exp(-quad_s[k] + rc.c[P23]),
        sqrt_q * std::exp(+quad_q[k] + rc.c[P31]),
        sqrt_s * std::exp(+quad_s[k] + rc.c[P32])};
    for (int c = 0; c < 6; ++c) {
      out.f[k][c] = vals[c].real();
      out.max_imag = std::max(out.max_imag, std::abs(vals[c].imag()));
    }
  }
  return out;
}

std::array<Cplx, 3> painleve_parameters(double r2, double dconst,
                                        double* vieta_residual) {
  // x^3 - 2 R^2 x^2 + R^4 x - D^2
  const double b2 = -2.0 * r2;
  const double b1 = r2 * r2;
  const double b0 = -dconst * dconst;
  const std::vector<Cplx> roots = cubic_roots(b2, b1, b0);
  std::array<Cplx, 3> out{roots[0], roots[1], roots[2]};
  if (vieta_residual) {
    const Cplx sum = out[0] + out[1] + out[2];
    const Cplx pairs = out[0] * out[1] + out[0] * out[2] + out[1] * out[2];
    const Cplx prod = out[0] * out[1] * out[2];
    *vieta_residual = std::max({std::abs(sum - 2.0 * r2),
                                std::abs(pairs - r2 * r2),
                                std::abs(prod - dconst * dconst)});
  }
  return out;
}

std::array<double, 6> swap_indices(const std::array<double, 6>& f) {
  std::array<double, 6> s;
  s[P12] = f[P21];
  s[P21] = f[P12];
  s[P13] = f[P31];
  s[P31] = f[P13];
  s[P23] = f[P32];
  s[P32] = f[P23];
  return s;
}

}  // namespace pvi
}  // namespace biflat
