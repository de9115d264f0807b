#include "biflat/models.hpp"

#include <memory>

#include "biflat/ode.hpp"

namespace biflat {

namespace {

void require_gap(const Point& p, double separation) {
  require_admissible(p, separation, false);
}

}  // namespace

// ---------------------------------------------------------------------------
// epsilon-system.
// ---------------------------------------------------------------------------

namespace {

double eps_lame_value(const EpsilonModel& m, double exponent, int i,
                      const Point& p) {
  require_gap(p, m.separation);
  double h = 1.0;
  for (int l = 0; l < m.n; ++l) {
    if (l == i) continue;
    h *= std::pow(std::abs(p.u[i] - p.u[l]), exponent);
  }
  return h;
}

// d_j H_i / H_i for H_i = prod |u^i - u^l|^{-eps}.
double eps_log_partial(const EpsilonModel& m, double eps, int i, int j,
                       const Point& p) {
  if (j != i) return eps / (p.u[i] - p.u[j]);
  double s = 0.0;
  for (int l = 0; l < m.n; ++l)
    if (l != i) s -= eps / (p.u[i] - p.u[l]);
  return s;
}

}  // namespace

LameField epsilon_lame(const EpsilonModel& m) {
  LameField f;
  f.n = m.n;
  f.provenance = "epsilon(n=" + std::to_string(m.n) +
                 ",eps=" + std::to_string(m.eps) + ")";
  f.homogeneity = Homogeneity{(m.n - 1) * m.eps, -1};
  f.value = [m](int i, const Point& p) { return eps_lame_value(m, -m.eps, i, p); };
  f.partial = [m](int i, int j, const Point& p) {
    return eps_lame_value(m, -m.eps, i, p) * eps_log_partial(m, m.eps, i, j, p);
  };
  return f;
}

LameField epsilon_adjoint(const EpsilonModel& m) {
  LameField f;
  f.n = m.n;
  f.provenance = "epsilon-adjoint(n=" + std::to_string(m.n) +
                 ",eps=" + std::to_string(m.eps) + ")";
  f.adjoint = true;
  f.homogeneity = Homogeneity{-(m.n - 1) * m.eps, -1};
  f.value = [m](int i, const Point& p) { return eps_lame_value(m, m.eps, i, p); };
  f.partial = [m](int i, int j, const Point& p) {
    return eps_lame_value(m, m.eps, i, p) * eps_log_partial(m, -m.eps, i, j, p);
  };
  return f;
}

RotationField epsilon_rotation(const EpsilonModel& m) {
  RotationField f;
  f.n = m.n;
  f.separation = m.separation;
  f.provenance = "epsilon(n=" + std::to_string(m.n) +
                 ",eps=" + std::to_string(m.eps) + ")";
  f.value = [m](int i, int j, const Point& p) {
    require_gap(p, m.separation);
    const double hi = eps_lame_value(m, -m.eps, i, p);
    const double hj = eps_lame_value(m, -m.eps, j, p);
    return m.eps * hi / (hj * (p.u[i] - p.u[j]));
  };
  f.partial = [m](int i, int j, int k, const Point& p) {
    require_gap(p, m.separation);
    const double hi = eps_lame_value(m, -m.eps, i, p);
    const double hj = eps_lame_value(m, -m.eps, j, p);
    const double bij = m.eps * hi / (hj * (p.u[i] - p.u[j]));
    // logarithmic derivative of H_i / (H_j (u^i - u^j))
    double dlog = eps_log_partial(m, m.eps, i, k, p) -
                  eps_log_partial(m, m.eps, j, k, p);
    if (k == i) dlog -= 1.0 / (p.u[i] - p.u[j]);
    if (k == j) dlog += 1.0 / (p.u[i] - p.u[j]);
    return bij * dlog;
  };
  return f;
}

std::pair<RotationField, LameField> epsilon_fields(const EpsilonModel& m) {
  return {epsilon_rotation(m), epsilon_lame(m)};
}

VectorField epsilon_velocity(const EpsilonModel& m) {
  VectorField f;
  f.label = "epsilon-velocity";
  const int n = m.n;
  const double eps = m.eps;
  f.value = [n, eps](const Point& p) {
    double s = 0.0;
    for (double x : p.u) s += x;
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = p.u[i] - eps * s;
    return v;
  };
  f.jacobian = [n, eps](const Point&) {
    Vec j(n * n, -eps);
    for (int i = 0; i < n; ++i) j[i * n + i] += 1.0;
    return j;
  };
  return f;
}

// ---------------------------------------------------------------------------
// n = 2 rotation coefficients.
// ---------------------------------------------------------------------------

RotationField n2_rotation(const N2Model& m) {
  RotationField f;
  f.n = 2;
  f.separation = m.separation;
  f.provenance = "n2(C1=" + std::to_string(m.c1) +
                 ",C2=" + std::to_string(m.c2) + ")";
  f.value = [m](int i, int j, const Point& p) {
    require_gap(p, m.separation);
    const double w = p.u[0] - p.u[1];
    return (i == 0 && j == 1) ? m.c1 / w : m.c2 / w;
  };
  f.partial = [m](int i, int j, int k, const Point& p) {
    require_gap(p, m.separation);
    const double w = p.u[0] - p.u[1];
    const double c = (i == 0 && j == 1) ? m.c1 : m.c2;
    return (k == 0 ? -c : c) / (w * w);
  };
  return f;
}

// ---------------------------------------------------------------------------
// n = 2 natural Lame family.
// ---------------------------------------------------------------------------

LameField n2_natural_lame(const N2Model& m, double a, double b) {
  if (m.c1 == 0.0)
    throw InvalidModelError("n2 natural Lame family needs C1 != 0");
  if (m.c1 * m.c2 <= 0.0)
    throw BranchError(
        "n2 natural Lame family is real only for C1*C2 > 0; "
        "use the complex evaluator");
  const double s = std::sqrt(m.c1 * m.c2);
  const double r = std::sqrt(m.c2 / m.c1);

  LameField f;
  f.n = 2;
  f.provenance = "n2-natural(a=" + std::to_string(a) +
                 ",b=" + std::to_string(b) + ")";
  f.value = [m, a, b, s, r](int i, const Point& p) {
    require_gap(p, m.separation);
    const double w = p.u[0] - p.u[1];
    if (w <= 0.0)
      throw DomainError("n2 natural Lame family needs u1 > u2 in real mode");
    const double th = s * std::log(w);
    if (i == 0) return a * std::sin(th) + b * std::cos(th);
    return -r * (a * std::cos(th) - b * std::sin(th));
  };
  f.partial = [m, a, b, s, r](int i, int j, const Point& p) {
    require_gap(p, m.separation);
    const double w = p.u[0] - p.u[1];
    if (w <= 0.0)
      throw DomainError("n2 natural Lame family needs u1 > u2 in real mode");
    const double th = s * std::log(w);
    double d1;  // d/du^1; the fields depend on u^1 - u^2 only
    if (i == 0)
      d1 = (a * std::cos(th) - b * std::sin(th)) * s / w;
    else
      d1 = r * s * (a * std::sin(th) + b * std::cos(th)) / w;
    return j == 0 ? d1 : -d1;
  };
  return f;
}

std::array<std::complex<double>, 2> n2_natural_lame_complex(const N2Model& m,
                                                            double a, double b,
                                                            double u1,
                                                            double u2) {
  using C = std::complex<double>;
  const C w(u1 - u2, 0.0);
  if (std::abs(w) < m.separation)
    throw DomainError("coordinate collision in n2 evaluation");
  const C s = std::sqrt(C(m.c1 * m.c2, 0.0));
  const C r = std::sqrt(C(m.c2 / m.c1, 0.0));
  const C th = s * std::log(w);
  const C h1 = a * std::sin(th) + b * std::cos(th);
  const C h2 = -r * (a * std::cos(th) - b * std::sin(th));
  return {h1, h2};
}

// ---------------------------------------------------------------------------
// n = 2 dual Lame family.
// ---------------------------------------------------------------------------

double n2_dual_fpp(const N2Model& m, double d, double z, double f, double fp) {
  const double zm = z - 1.0;
  return -(fp * (z * z - z - d * zm * zm) + m.c1 * m.c2 * f) / (z * zm * zm);
}

double n2_special_f(const N2SpecialDual& s, double z) {
  const double d = s.d;
  const double zm = z - 1.0;
  const double qa = (d - 1.0) * z - (d + 2.0);
  const double fa = qa * std::pow(z, d + 1.0) / (zm * zm);
  const double fb = ((d * d + 3.0 * d + 2.0) * z * z +
                     (4.0 - 2.0 * d - 2.0 * d * d) * z + (d * d - d)) /
                    (zm * zm);
  return s.a * fa + s.b * fb;
}

double n2_special_fp(const N2SpecialDual& s, double z) {
  const double d = s.d;
  const double zm = z - 1.0;
  const double qa = (d - 1.0) * z - (d + 2.0);
  const double dqa = d - 1.0;
  const double zd = std::pow(z, d);
  const double fa_p = (dqa * z * zd + qa * (d + 1.0) * zd) / (zm * zm) -
                      2.0 * qa * z * zd / (zm * zm * zm);
  const double pb = (d * d + 3.0 * d + 2.0) * z * z +
                    (4.0 - 2.0 * d - 2.0 * d * d) * z + (d * d - d);
  const double dpb =
      2.0 * (d * d + 3.0 * d + 2.0) * z + (4.0 - 2.0 * d - 2.0 * d * d);
  const double fb_p = dpb / (zm * zm) - 2.0 * pb / (zm * zm * zm);
  return s.a * fa_p + s.b * fb_p;
}

namespace {

struct DualGeometry {
  double z, u1, u2;
};

DualGeometry dual_point(const N2Model& m, const Point& p, double pole_guard) {
  require_gap(p, m.separation);
  const double u1 = p.u[0], u2 = p.u[1];
  if (u1 < m.separation)
    throw DomainError("n2 dual family needs u1 > 0 in real mode");
  const double z = u2 / u1;
  if (z < 0.0) throw DomainError("n2 dual family needs u2/u1 > 0 in real mode");
  if (std::abs(z) < pole_guard || std::abs(z - 1.0) < pole_guard)
    throw PoleError("z = u2/u1 too close to a singular point (0 or 1)");
  return {z, u1, u2};
}

// Assemble the Lame field from (f, f', f'') closures.
LameField dual_lame_from_f(const N2Model& m, double d,
                           std::function<double(double)> f,
                           std::function<double(double)> fp,
                           std::function<double(double)> fpp,
                           std::string provenance, double pole_guard) {
  LameField out;
  out.n = 2;
  out.provenance = std::move(provenance);
  out.homogeneity = Homogeneity{d, +1};
  out.value = [m, d, f, fp, pole_guard](int i, const Point& p) {
    const DualGeometry g = dual_point(m, p, pole_guard);
    if (i == 0) return f(g.z) * std::pow(g.u1, d);
    return (g.u1 - g.u2) * fp(g.z) * std::pow(g.u1, d - 1.0) / m.c1;
  };
  out.partial = [m, d, f, fp, fpp, pole_guard](int i, int j, const Point& p) {
    const DualGeometry g = dual_point(m, p, pole_guard);
    const double w = g.u1 - g.u2;
    if (i == 0) {
      if (j == 0)
        return std::pow(g.u1, d - 1.0) * (d * f(g.z) - g.z * fp(g.z));
      return fp(g.z) * std::pow(g.u1, d - 1.0);
    }
    if (j == 0)
      return (fp(g.z) * std::pow(g.u1, d - 1.0) +
              w * std::pow(g.u1, d - 2.0) *
                  ((d - 1.0) * fp(g.z) - g.z * fpp(g.z))) /
             m.c1;
    return (-fp(g.z) * std::pow(g.u1, d - 1.0) +
            w * std::pow(g.u1, d - 2.0) * fpp(g.z)) /
           m.c1;
  };
  return out;
}

}  // namespace

LameField n2_dual_lame_special(const N2Model& m, const N2SpecialDual& s) {
  if (m.c1 != 1.0 || m.c2 != -4.0)
    throw InvalidModelError(
        "the closed-form dual family is the C1 = 1, C2 = -4 case");
  const N2Model mc = m;
  const N2SpecialDual sc = s;
  return dual_lame_from_f(
      m, s.d, [sc](double z) { return n2_special_f(sc, z); },
      [sc](double z) { return n2_special_fp(sc, z); },
      [mc, sc](double z) {
        return n2_dual_fpp(mc, sc.d, z, n2_special_f(sc, z),
                           n2_special_fp(sc, z));
      },
      "n2-dual-special(d=" + std::to_string(s.d) + ")", 1e-3);
}

N2OdeSolution n2_dual_ode_solve(const N2Model& m, const N2OdeDual& opts) {
  if (!(opts.zlo < opts.zhi) || opts.z0 < opts.zlo || opts.z0 > opts.zhi)
    throw DomainError("n2 dual solve: need zlo <= z0 <= zhi");
  for (double edge : {opts.zlo, opts.zhi}) {
    if (std::abs(edge) < opts.pole_guard ||
        std::abs(edge - 1.0) < opts.pole_guard)
      throw PoleError("n2 dual solve range touches a singular point");
  }
  if (opts.zlo < 0.0 && opts.zhi > 0.0)
    throw PoleError("n2 dual solve range crosses z = 0");
  if (opts.zlo < 1.0 && opts.zhi > 1.0)
    throw PoleError("n2 dual solve range crosses z = 1");

  auto rhs = [&m, &opts](double z, const Vec& y, Vec& dy) {
    dy[0] = y[1];
    dy[1] = n2_dual_fpp(m, opts.d, z, y[0], y[1]);
  };
  OdeOptions oo;
  oo.abs_tol = oo.rel_tol = opts.tol;
  oo.max_step = 0.005;

  N2OdeSolution sol;
  sol.d = opts.d;
  auto append = [&](const OdeDense& run, bool reversed) {
    const size_t k = run.t.size();
    for (size_t idx = 0; idx < k; ++idx) {
      const size_t q = reversed ? k - 1 - idx : idx;
      if (!sol.z.empty() && run.t[q] == sol.z.back()) continue;
      sol.z.push_back(run.t[q]);
      sol.f.push_back(run.y[q][0]);
      sol.fp.push_back(run.y[q][1]);
    }
  };
  if (opts.z0 > opts.zlo) {
    OdeDense left = integrate_rk45(rhs, opts.z0, opts.zlo,
                                   Vec{opts.f0, opts.fp0}, oo);
    append(left, true);
  } else {
    sol.z.push_back(opts.z0);
    sol.f.push_back(opts.f0);
    sol.fp.push_back(opts.fp0);
  }
  if (opts.z0 < opts.zhi) {
    OdeDense right = integrate_rk45(rhs, opts.z0, opts.zhi,
                                    Vec{opts.f0, opts.fp0}, oo);
    append(right, false);
  }
  sol.fpp.resize(sol.z.size());
  for (size_t k = 0; k < sol.z.size(); ++k)
    sol.fpp[k] = n2_dual_fpp(m, opts.d, sol.z[k], sol.f[k], sol.fp[k]);
  return sol;
}

double N2OdeSolution::eval_f(double zq) const {
  return hermite_eval(z, f, fp, zq);
}

double N2OdeSolution::eval_fp(double zq) const {
  return hermite_eval(z, fp, fpp, zq);
}

LameField n2_dual_lame_ode(const N2Model& m, const N2OdeSolution& sol) {
  auto shared = std::make_shared<N2OdeSolution>(sol);
  const N2Model mc = m;
  const double d = sol.d;
  return dual_lame_from_f(
      m, d, [shared](double z) { return shared->eval_f(z); },
      [shared](double z) { return shared->eval_fp(z); },
      [mc, d, shared](double z) {
        return n2_dual_fpp(mc, d, z, shared->eval_f(z), shared->eval_fp(z));
      },
      "n2-dual-ode(d=" + std::to_string(d) + ")", 1e-3);
}

// ---------------------------------------------------------------------------
// n = 2 bi-flat family.
// ---------------------------------------------------------------------------

N2Biflat n2_biflat(const N2Model& m, int degree_branch) {
  if (m.c1 == 0.0 || m.c2 == 0.0)
    throw DegeneracyError("bi-flat family needs C1 != 0 and C2 != 0");
  if (-m.c1 * m.c2 <= 0.0)
    throw InvalidModelError(
        "bi-flat family is real only for -C1*C2 > 0 (d^2 = -C1 C2)");

  N2Biflat out;
  out.degree = (degree_branch >= 0 ? 1.0 : -1.0) * std::sqrt(-m.c1 * m.c2);
  out.coef1 = 1.0;
  out.coef2 = out.degree / m.c1;

  // Both constraints must agree and square to -C1 C2.
  const double r1 = -m.c1 * out.coef2 / out.coef1;
  const double r2 = m.c2 * out.coef1 / out.coef2;
  const double scale = std::max(1.0, std::abs(out.degree));
  if (std::abs(r1 - r2) > 1e-12 * scale ||
      std::abs(out.degree * out.degree + m.c1 * m.c2) > 1e-12 * scale * scale)
    throw InvalidModelError("bi-flat constraints violated beyond 1e-12");

  out.beta = n2_rotation(m);

  LameField lame;
  lame.n = 2;
  lame.provenance = "n2-biflat(d=" + std::to_string(out.degree) + ")";
  lame.homogeneity = Homogeneity{out.degree, -1};
  const double dd = out.degree;
  const double sep = m.separation;
  const std::array<double, 2> coef{out.coef1, out.coef2};
  lame.value = [coef, dd, sep](int i, const Point& p) {
    require_admissible(p, sep, false);
    return coef[i] * std::pow(std::abs(p.u[0] - p.u[1]), -dd);
  };
  lame.partial = [coef, dd, sep](int i, int j, const Point& p) {
    require_admissible(p, sep, false);
    const double w = p.u[0] - p.u[1];
    const double v = coef[i] * std::pow(std::abs(w), -dd);
    const double d1 = -dd * v / w;
    return j == 0 ? d1 : -d1;
  };
  out.lame = lame;
  return out;
}

double n2_biflat_expected_gamma112(const N2Biflat& b, const Point& p) {
  return -b.degree / (p.u[1] - p.u[0]);
}

double n2_biflat_expected_gamma221(const N2Biflat& b, const Point& p) {
  return b.degree / (p.u[1] - p.u[0]);
}

}  // namespace biflat
