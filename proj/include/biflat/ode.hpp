#pragma once

// Generic explicit integrators: adaptive Dormand-Prince 5(4) with dense
// node storage, a fixed-step RK4, and piecewise cubic Hermite evaluation
// for the stored trajectories.

#include <functional>
#include <limits>

#include "biflat/common.hpp"

namespace biflat {

struct OdeOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  double min_step = 1e-14;
  double init_step = 0.0;  // 0 -> derived from the range
  long max_steps = 2000000;
};

struct OdeDense {
  std::vector<double> t;
  std::vector<Vec> y;
  std::vector<Vec> dy;  // rhs at the nodes, for Hermite interpolation
};

// rhs: void(double t, const Vec& y, Vec& dy)
// on_step: bool(double t, const Vec& y) called after each accepted step;
// returning false aborts with a NumericError.
template <class Rhs, class Cb>
OdeDense integrate_rk45(Rhs&& rhs, double t0, double t1, Vec y0,
                        const OdeOptions& opts, Cb&& on_step) {
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                          e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640,
                          e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;

  const size_t m = y0.size();
  const double dir = (t1 >= t0) ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  if (span == 0.0) throw DomainError("integrate_rk45: empty range");

  double h = opts.init_step > 0.0 ? opts.init_step : span / 100.0;
  h = std::min(h, opts.max_step);
  h = std::min(h, span);

  OdeDense out;
  Vec y = std::move(y0);
  Vec k1(m), k2(m), k3(m), k4(m), k5(m), k6(m), k7(m), ytmp(m), ynew(m);
  double t = t0;

  rhs(t, y, k1);
  out.t.push_back(t);
  out.y.push_back(y);
  out.dy.push_back(k1);
  if (!on_step(t, y)) throw NumericError("integration aborted at start");

  long steps = 0;
  while (dir * (t1 - t) > 0.0) {
    if (++steps > opts.max_steps)
      throw NumericError("integrate_rk45: step budget exhausted");
    h = std::min(h, std::abs(t1 - t));
    const double hd = dir * h;

    for (size_t i = 0; i < m; ++i) ytmp[i] = y[i] + hd * a21 * k1[i];
    rhs(t + c2 * hd, ytmp, k2);
    for (size_t i = 0; i < m; ++i)
      ytmp[i] = y[i] + hd * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * hd, ytmp, k3);
    for (size_t i = 0; i < m; ++i)
      ytmp[i] = y[i] + hd * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * hd, ytmp, k4);
    for (size_t i = 0; i < m; ++i)
      ytmp[i] = y[i] + hd * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                             a54 * k4[i]);
    rhs(t + c5 * hd, ytmp, k5);
    for (size_t i = 0; i < m; ++i)
      ytmp[i] = y[i] + hd * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                             a64 * k4[i] + a65 * k5[i]);
    rhs(t + hd, ytmp, k6);
    for (size_t i = 0; i < m; ++i)
      ynew[i] = y[i] + hd * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                             b5 * k5[i] + b6 * k6[i]);
    rhs(t + hd, ynew, k7);

    double err = 0.0;
    for (size_t i = 0; i < m; ++i) {
      const double e = hd * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                             e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc =
          opts.abs_tol +
          opts.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (e / sc) * (e / sc);
    }
    err = std::sqrt(err / static_cast<double>(m));

    if (err <= 1.0) {
      t += hd;
      y = ynew;
      k1 = k7;  // FSAL
      out.t.push_back(t);
      out.y.push_back(y);
      out.dy.push_back(k1);
      if (!on_step(t, y)) throw NumericError("integration aborted");
    }
    const double fac =
        std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
    h = std::min(h * fac, opts.max_step);
    if (h < opts.min_step)
      throw NumericError("integrate_rk45: step size underflow");
  }
  return out;
}

template <class Rhs>
OdeDense integrate_rk45(Rhs&& rhs, double t0, double t1, Vec y0,
                        const OdeOptions& opts) {
  return integrate_rk45(std::forward<Rhs>(rhs), t0, t1, std::move(y0), opts,
                        [](double, const Vec&) { return true; });
}

// One classical RK4 step, y advanced in place.
template <class Rhs>
void rk4_step(Rhs&& rhs, double t, double h, Vec& y) {
  const size_t m = y.size();
  Vec k1(m), k2(m), k3(m), k4(m), tmp(m);
  rhs(t, y, k1);
  for (size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  rhs(t + 0.5 * h, tmp, k2);
  for (size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  rhs(t + 0.5 * h, tmp, k3);
  for (size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * k3[i];
  rhs(t + h, tmp, k4);
  for (size_t i = 0; i < m; ++i)
    y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

// ---------------------------------------------------------------------------
// Piecewise cubic Hermite evaluation on an ascending grid.
// ---------------------------------------------------------------------------

inline size_t hermite_interval(const std::vector<double>& xs, double x) {
  if (xs.size() < 2) throw DomainError("hermite: need at least two nodes");
  const double slack = 1e-9 * (std::abs(xs.front()) + std::abs(xs.back()) + 1.0);
  if (x < xs.front() - slack || x > xs.back() + slack)
    throw DomainError("hermite: query outside the sampled range");
  size_t lo = 0, hi = xs.size() - 1;
  while (hi - lo > 1) {
    const size_t mid = (lo + hi) / 2;
    if (xs[mid] <= x)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

inline double hermite_eval(const std::vector<double>& xs,
                           const std::vector<double>& ys,
                           const std::vector<double>& ds, double x) {
  const size_t k = hermite_interval(xs, x);
  const double h = xs[k + 1] - xs[k];
  const double s = (x - xs[k]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * ys[k] + h10 * h * ds[k] + h01 * ys[k + 1] + h11 * h * ds[k + 1];
}

// Adaptive composite Simpson quadrature.
namespace detail {
template <class F>
double simpson_rec(F&& f, double a, double fa, double b, double fb, double m,
                   double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0) return left + right;
  if (std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-11,
                        int max_depth = 40) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

}  // namespace biflat
