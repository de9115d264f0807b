#include "biflat/hierarchy.hpp"

#include "biflat/ode.hpp"

namespace biflat {
namespace hier {

double symmetry_residual(const ConnectionField& conn, const ProductField& c,
                         const VectorField& x, const Point& p,
                         const FdScheme& fd) {
  const int n = c.n;
  auto endo = [&](const Point& q) {
    const Tensor3 t = c.structure(q);
    const Vec xv = x.value(q);
    Vec flat(n * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        double v = 0.0;
        for (int s = 0; s < n; ++s) v += t(i, k, s) * xv[s];
        flat[i * n + k] = v;
      }
    return flat;
  };

  const Vec t0 = endo(p);
  std::vector<Vec> dt(n);
  for (int j = 0; j < n; ++j) dt[j] = fd.partial_vec(endo, p, j);

  const Christoffel g = conn(p);
  auto cov = [&](int j, int i, int k) {
    double v = dt[j][i * n + k];
    for (int s = 0; s < n; ++s) {
      v += g.at(i, j, s) * t0[s * n + k];
      v -= g.at(s, j, k) * t0[i * n + s];
    }
    return v;
  };

  double res = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < j; ++k)
        res = std::max(res, std::abs(cov(j, i, k) - cov(k, i, j)));
  return res;
}

namespace {

// d_j X^i of the scheme's right-hand side at a path point.
struct SchemeRhs {
  RecursionScheme scheme;
  const ConnectionField* conn1;
  const ConnectionField* conn2;
  const ProductField* c;
  const VectorField* e_or_euler;
  const VectorField* x_prev;
  const FdScheme* fd;

  // target^i_j such that d_j X^i = target^i_j - G1^i_{js} X^s.
  Vec inhomogeneous(const Point& q) const {
    const int n = c->n;
    Vec t(n * n, 0.0);
    if (scheme == RecursionScheme::Principal) {
      const Tensor3 cs = c->structure(q);
      const Vec xp = x_prev->value(q);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double v = 0.0;
          for (int s = 0; s < n; ++s) v += cs(i, j, s) * xp[s];
          t[i * n + j] = v;
        }
      return t;
    }

    // Equivalent and dual: d_j Y^i + G2^i_{js} Y^s with Y = Xprev or
    // Y = E o Xprev.
    auto y_of = [&](const Point& r) -> Vec {
      if (scheme == RecursionScheme::Equivalent) return x_prev->value(r);
      const Tensor3 cs = c->structure(r);
      const Vec ev = e_or_euler->value(r);
      const Vec xp = x_prev->value(r);
      Vec y(n, 0.0);
      for (int i = 0; i < n; ++i) {
        double v = 0.0;
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) v += cs(i, j, k) * ev[j] * xp[k];
        y[i] = v;
      }
      return y;
    };

    const Vec y0 = y_of(q);
    Vec dy(n * n, 0.0);
    if (scheme == RecursionScheme::Equivalent && x_prev->jacobian) {
      dy = x_prev->jacobian(q);
    } else {
      for (int j = 0; j < n; ++j) {
        const Vec col = fd->partial_vec(y_of, q, j);
        for (int i = 0; i < n; ++i) dy[i * n + j] = col[i];
      }
    }
    const Christoffel g2 = (*conn2)(q);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = dy[i * n + j];
        for (int s = 0; s < n; ++s) v += g2.at(i, j, s) * y0[s];
        t[i * n + j] = v;
      }
    return t;
  }
};

}  // namespace

Vec recursion_step_path(RecursionScheme scheme, const ConnectionField& conn1,
                        const ConnectionField& conn2, const ProductField& c,
                        const VectorField& e_or_euler,
                        const VectorField& x_prev,
                        const std::vector<Point>& waypoints, const Vec& x_base,
                        const FdScheme& fd, const RecursionOptions& opts) {
  if (waypoints.size() < 2)
    throw DomainError("recursion path needs at least two waypoints");
  const int n = c.n;
  SchemeRhs rhs{scheme, &conn1, &conn2, &c, &e_or_euler, &x_prev, &fd};

  Vec x = x_base;
  for (size_t seg = 0; seg + 1 < waypoints.size(); ++seg) {
    const Point& a = waypoints[seg];
    const Point& b = waypoints[seg + 1];
    Vec dir(n);
    for (int i = 0; i < n; ++i) dir[i] = b.u[i] - a.u[i];

    auto ode = [&](double t, const Vec& y, Vec& dy) {
      Point q;
      q.u.resize(n);
      for (int i = 0; i < n; ++i) q.u[i] = a.u[i] + t * dir[i];
      require_admissible(q, opts.separation, false);
      const Vec target = rhs.inhomogeneous(q);
      const Christoffel g1 = conn1(q);
      for (int i = 0; i < n; ++i) {
        double v = 0.0;
        for (int j = 0; j < n; ++j) {
          double dj = target[i * n + j];
          for (int s = 0; s < n; ++s) dj -= g1.at(i, j, s) * y[s];
          v += dir[j] * dj;
        }
        dy[i] = v;
      }
    };

    const double h = 1.0 / opts.steps_per_segment;
    for (int k = 0; k < opts.steps_per_segment; ++k)
      rk4_step(ode, k * h, h, x);
  }
  return x;
}

Vec recursion_step(RecursionScheme scheme, const ConnectionField& conn1,
                   const ConnectionField& conn2, const ProductField& c,
                   const VectorField& e_or_euler, const VectorField& x_prev,
                   const Point& base, const Vec& x_base, const Point& target,
                   const FdScheme& fd, const RecursionOptions& opts) {
  return recursion_step_path(scheme, conn1, conn2, c, e_or_euler, x_prev,
                             {base, target}, x_base, fd, opts);
}

VectorField recursion_step_field(RecursionScheme scheme,
                                 const ConnectionField& conn1,
                                 const ConnectionField& conn2,
                                 const ProductField& c,
                                 const VectorField& e_or_euler,
                                 const VectorField& x_prev, const Point& base,
                                 const Vec& x_base, const FdScheme& fd,
                                 const RecursionOptions& opts) {
  VectorField out;
  out.label = "recursion-step";
  out.value = [=](const Point& q) {
    return recursion_step(scheme, conn1, conn2, c, e_or_euler, x_prev, base,
                          x_base, q, fd, opts);
  };
  return out;
}

bool resonant_chain(const std::vector<VectorField>& chain,
                    const std::vector<Point>& probes, double threshold) {
  if (chain.size() < 2 || probes.empty()) return false;
  const size_t rows = probes.size() * probes.front().dim();
  const size_t cols = chain.size() - 1;

  // Stack samples: column k holds chain[k], rhs holds the newest member.
  std::vector<Vec> basis(cols, Vec(rows, 0.0));
  Vec newest(rows, 0.0);
  for (size_t pi = 0; pi < probes.size(); ++pi) {
    for (size_t k = 0; k < cols; ++k) {
      const Vec v = chain[k].value(probes[pi]);
      for (size_t i = 0; i < v.size(); ++i)
        basis[k][pi * v.size() + i] = v[i];
    }
    const Vec v = chain.back().value(probes[pi]);
    for (size_t i = 0; i < v.size(); ++i) newest[pi * v.size() + i] = v[i];
  }

  // Modified Gram-Schmidt projection of the newest member.
  double norm0 = 0.0;
  for (double v : newest) norm0 += v * v;
  norm0 = std::sqrt(norm0);
  if (norm0 == 0.0) return true;

  for (size_t k = 0; k < cols; ++k) {
    Vec q = basis[k];
    for (size_t j = 0; j < k; ++j) {
      double dot = 0.0;
      for (size_t i = 0; i < rows; ++i) dot += q[i] * basis[j][i];
      for (size_t i = 0; i < rows; ++i) q[i] -= dot * basis[j][i];
    }
    double qn = 0.0;
    for (double v : q) qn += v * v;
    qn = std::sqrt(qn);
    if (qn < 1e-300) {
      basis[k].assign(rows, 0.0);
      continue;
    }
    for (double& v : q) v /= qn;
    basis[k] = q;
    double dot = 0.0;
    for (size_t i = 0; i < rows; ++i) dot += newest[i] * q[i];
    for (size_t i = 0; i < rows; ++i) newest[i] -= dot * q[i];
  }
  double rnorm = 0.0;
  for (double v : newest) rnorm += v * v;
  rnorm = std::sqrt(rnorm);
  return rnorm / norm0 < threshold;
}

// ---------------------------------------------------------------------------
// Grid flows.
// ---------------------------------------------------------------------------

GridState make_grid(int n, int cells, double length, const Vec& base,
                    const Vec& amplitude, const Vec& phase) {
  if (cells < 16) throw DomainError("grid needs at least 16 cells");
  GridState g;
  g.n = n;
  g.cells = cells;
  g.length = length;
  g.a.resize(static_cast<size_t>(cells) * n);
  const double two_pi = 2.0 * std::acos(-1.0);
  for (int m = 0; m < cells; ++m) {
    const double xx = length * m / cells;
    for (int i = 0; i < n; ++i)
      g.at(m, i) =
          base[i] + amplitude[i] * std::sin(two_pi * xx / length + phase[i]);
  }
  return g;
}

void require_admissible_grid(const GridState& g, double separation) {
  Point p;
  p.u.resize(g.n);
  for (int m = 0; m < g.cells; ++m) {
    for (int i = 0; i < g.n; ++i) p.u[i] = g.at(m, i);
    require_admissible(p, separation, false);
  }
}

void grid_derivative(const GridState& g, Vec& out) {
  const int m = g.cells, n = g.n;
  out.assign(g.a.size(), 0.0);
  const double inv = 1.0 / (12.0 * g.dx());
  for (int cell = 0; cell < m; ++cell) {
    const int m1 = (cell - 1 + m) % m, m2 = (cell - 2 + m) % m;
    const int p1 = (cell + 1) % m, p2 = (cell + 2) % m;
    for (int i = 0; i < n; ++i)
      out[cell * n + i] = (g.a[m2 * n + i] - 8.0 * g.a[m1 * n + i] +
                           8.0 * g.a[p1 * n + i] - g.a[p2 * n + i]) *
                          inv;
  }
}

void flow_rhs(const ProductField& c, const VectorField& x, const GridState& g,
              Vec& dudt) {
  const int n = g.n;
  Vec ux;
  grid_derivative(g, ux);
  dudt.assign(g.a.size(), 0.0);
  Point p;
  p.u.resize(n);
  for (int cell = 0; cell < g.cells; ++cell) {
    for (int i = 0; i < n; ++i) p.u[i] = g.at(cell, i);
    const Tensor3 t = c.structure(p);
    const Vec xv = x.value(p);
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          v += t(i, j, k) * xv[j] * ux[cell * n + k];
      dudt[cell * n + i] = v;
    }
  }
}

void evolve(const ProductField& c, const VectorField& x, GridState& g,
            double dt, int steps) {
  auto ode = [&](double, const Vec& y, Vec& dy) {
    GridState tmp = g;
    tmp.a = y;
    flow_rhs(c, x, tmp, dy);
  };
  for (int k = 0; k < steps; ++k) rk4_step(ode, 0.0, dt, g.a);
}

double commutator_check(const ProductField& c, const VectorField& x,
                        const VectorField& y, const GridState& g, double dt,
                        int steps) {
  GridState xy = g, yx = g;
  evolve(c, x, xy, dt, steps);
  evolve(c, y, xy, dt, steps);
  evolve(c, y, yx, dt, steps);
  evolve(c, x, yx, dt, steps);
  double diff = 0.0;
  for (size_t k = 0; k < g.a.size(); ++k)
    diff = std::max(diff, std::abs(xy.a[k] - yx.a[k]));
  return diff;
}

double commutator_order(const ProductField& c, const VectorField& x,
                        const VectorField& y, const GridState& g, double dt0,
                        int steps, int levels, Vec* diffs) {
  Vec d;
  double dt = dt0;
  for (int lev = 0; lev <= levels; ++lev) {
    d.push_back(commutator_check(c, x, y, g, dt, steps));
    dt *= 0.5;
  }
  if (diffs) *diffs = d;
  double acc = 0.0;
  int cnt = 0;
  for (int lev = 0; lev + 1 <= levels; ++lev) {
    if (d[lev + 1] <= 0.0 || d[lev] <= 0.0) continue;
    acc += std::log2(d[lev] / d[lev + 1]);
    ++cnt;
  }
  if (cnt == 0) throw NumericError("commutator differences vanished");
  return acc / cnt;
}

}  // namespace hier
}  // namespace biflat
