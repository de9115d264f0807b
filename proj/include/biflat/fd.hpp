#pragma once

// Finite differences used throughout: 4th-order central stencil with one
// Richardson extrapolation level.  Exact on cubics; the Richardson pair
// (h, h/2) pushes the truncation error to O(h^6).

#include <utility>

#include "biflat/common.hpp"

namespace biflat {

struct FdScheme {
  double base_step = 1e-4;  // scaled by max(1, |u|_inf) at the point
  bool richardson = true;
  double scale = 1.0;  // per-field multiplier (interpolated fields use > 1)

  double step_for(const Point& p) const {
    return base_step * scale * std::max(1.0, p.max_abs());
  }

  // d/du^j of a scalar function at p.
  template <class F>
  double partial(F&& f, const Point& p, int j) const {
    const double h = step_for(p);
    if (!richardson) return central4(f, p, j, h);
    const double d1 = central4(f, p, j, h);
    const double d2 = central4(f, p, j, 0.5 * h);
    return (16.0 * d2 - d1) / 15.0;
  }

  // d/du^j of a Vec-valued function (flattened tensors).
  template <class F>
  Vec partial_vec(F&& f, const Point& p, int j) const {
    const double h = step_for(p);
    Vec d1 = central4_vec(f, p, j, h);
    if (!richardson) return d1;
    Vec d2 = central4_vec(f, p, j, 0.5 * h);
    for (size_t k = 0; k < d1.size(); ++k) d1[k] = (16.0 * d2[k] - d1[k]) / 15.0;
    return d1;
  }

  template <class F>
  static double central4(F&& f, Point p, int j, double h) {
    const double u0 = p.u[j];
    p.u[j] = u0 - 2.0 * h;
    const double fm2 = f(p);
    p.u[j] = u0 - h;
    const double fm1 = f(p);
    p.u[j] = u0 + h;
    const double fp1 = f(p);
    p.u[j] = u0 + 2.0 * h;
    const double fp2 = f(p);
    return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
  }

  template <class F>
  static Vec central4_vec(F&& f, Point p, int j, double h) {
    const double u0 = p.u[j];
    p.u[j] = u0 - 2.0 * h;
    Vec acc = f(p);
    p.u[j] = u0 - h;
    Vec fm1 = f(p);
    p.u[j] = u0 + h;
    Vec fp1 = f(p);
    p.u[j] = u0 + 2.0 * h;
    Vec fp2 = f(p);
    for (size_t k = 0; k < acc.size(); ++k)
      acc[k] = (acc[k] - 8.0 * fm1[k] + 8.0 * fp1[k] - fp2[k]) / (12.0 * h);
    return acc;
  }
};

}  // namespace biflat
