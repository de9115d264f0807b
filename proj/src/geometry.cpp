#include "biflat/geometry.hpp"

namespace biflat {

void require_admissible(const Point& p, double separation,
                        bool need_nonzero_coords) {
  if (p.dim() < 2) throw DomainError("point dimension must be at least 2");
  for (double x : p.u)
    if (!std::isfinite(x)) throw DomainError("non-finite coordinate");
  if (min_pair_gap(p) < separation)
    throw DomainError("coordinate collision: pairwise gap below " +
                      std::to_string(separation));
  if (need_nonzero_coords && min_abs_coord(p) < separation)
    throw DomainError("coordinate too close to zero for the dual structure");
}

Tensor3 ProductField::partial(const Point& p, int dir,
                              const FdScheme& fd) const {
  Vec flat = fd.partial_vec(
      [this](const Point& q) { return structure(q).data(); }, p, dir);
  Tensor3 out(n);
  out.data() = std::move(flat);
  return out;
}

ProductField canonical_product(int n) {
  ProductField f;
  f.n = n;
  f.provenance = "canonical";
  f.structure = [n](const Point&) {
    Tensor3 c(n);
    for (int i = 0; i < n; ++i) c(i, i, i) = 1.0;
    return c;
  };
  f.unit = [n](const Point&) { return Vec(n, 1.0); };
  f.euler = [](const Point& p) { return p.u; };
  return f;
}

ProductField dual_product(int n, double separation) {
  ProductField f;
  f.n = n;
  f.provenance = "dual";
  f.structure = [n, separation](const Point& p) {
    require_admissible(p, separation, true);
    Tensor3 c(n);
    for (int i = 0; i < n; ++i) c(i, i, i) = 1.0 / p.u[i];
    return c;
  };
  f.unit = [](const Point& p) { return p.u; };
  f.euler = [](const Point& p) { return p.u; };
  return f;
}

ProductAxiomResiduals product_axioms(const ProductField& c, const Point& p) {
  const int n = c.n;
  const Tensor3 t = c.structure(p);
  ProductAxiomResiduals out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        out.commutativity =
            std::max(out.commutativity, std::abs(t(i, j, k) - t(i, k, j)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double lhs = 0.0, rhs = 0.0;
          for (int s = 0; s < n; ++s) {
            lhs += t(s, j, k) * t(i, s, l);
            rhs += t(s, k, l) * t(i, j, s);
          }
          out.associativity = std::max(out.associativity, std::abs(lhs - rhs));
        }
  const Vec e = c.unit(p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = 0.0;
      for (int k = 0; k < n; ++k) v += t(i, j, k) * e[k];
      out.unit = std::max(out.unit, std::abs(v - (i == j ? 1.0 : 0.0)));
    }
  return out;
}

VectorField unit_vector_field(int n) {
  VectorField f;
  f.label = "e";
  f.value = [n](const Point&) { return Vec(n, 1.0); };
  f.jacobian = [n](const Point&) { return Vec(n * n, 0.0); };
  return f;
}

VectorField euler_vector_field(int n) {
  VectorField f;
  f.label = "E";
  f.value = [](const Point& p) { return p.u; };
  f.jacobian = [n](const Point&) {
    Vec j(n * n, 0.0);
    for (int i = 0; i < n; ++i) j[i * n + i] = 1.0;
    return j;
  };
  return f;
}

Vec vector_field_jacobian(const VectorField& x, const Point& p,
                          const FdScheme& fd) {
  if (x.jacobian) return x.jacobian(p);
  const int n = p.dim();
  Vec jac(n * n, 0.0);
  for (int j = 0; j < n; ++j) {
    Vec col = fd.partial_vec([&x](const Point& q) { return x.value(q); }, p, j);
    for (int i = 0; i < n; ++i) jac[i * n + j] = col[i];
  }
  return jac;
}

Tensor4 riemann_curvature(const ConnectionField& conn, const Point& p,
                          const FdScheme& fd) {
  const Christoffel g0 = conn(p);
  const int n = g0.dim();

  // dg[k] = d/du^k of the flattened Christoffel array.
  std::vector<Vec> dg(n);
  for (int k = 0; k < n; ++k)
    dg[k] = fd.partial_vec(
        [&conn](const Point& q) { return conn(q).gamma.data(); }, p, k);
  auto dgamma = [&](int d, int i, int j, int k) {
    return dg[d][(i * n + j) * n + k];
  };

  Tensor4 r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double quad = 0.0;
          for (int s = 0; s < n; ++s)
            quad += g0.at(i, k, s) * g0.at(s, l, j) -
                    g0.at(i, l, s) * g0.at(s, k, j);
          r(i, j, k, l) = dgamma(k, i, l, j) - dgamma(l, i, k, j) + quad;
        }
  return r;
}

double riemann_max_abs(const ConnectionField& conn, const Point& p,
                       const FdScheme& fd) {
  return riemann_curvature(conn, p, fd).max_abs();
}

double first_bianchi_residual(const Tensor4& r) {
  const int n = r.dim();
  double m = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          m = std::max(m, std::abs(r(i, j, k, l) + r(i, k, l, j) +
                                   r(i, l, j, k)));
  return m;
}

double hertling_manin_residual(const ProductField& c, const Point& p,
                               const FdScheme& fd) {
  const int n = c.n;
  const Tensor3 t = c.structure(p);
  std::vector<Tensor3> dt(n);
  for (int d = 0; d < n; ++d) dt[d] = c.partial(p, d, fd);

  // Component form of Lie_{X o Y}(o) = X o Lie_Y(o) + Y o Lie_X(o) with
  // X = d_i, Y = d_j and slots Z = d_l, W = d_m:
  //   c^s_{ij} d_s c^k_{lm} - c^s_{lm} d_s c^k_{ij}
  //   + (d_l c^s_{ij}) c^k_{sm} + (d_m c^s_{ij}) c^k_{ls}
  //   - (d_j c^s_{lm}) c^k_{is} - (d_i c^s_{lm}) c^k_{js} = 0.
  double res = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m) {
            double acc = 0.0;
            for (int s = 0; s < n; ++s) {
              acc += t(s, i, j) * dt[s](k, l, m);
              acc -= t(s, l, m) * dt[s](k, i, j);
              acc += dt[l](s, i, j) * t(k, s, m);
              acc += dt[m](s, i, j) * t(k, l, s);
              acc -= dt[j](s, l, m) * t(k, i, s);
              acc -= dt[i](s, l, m) * t(k, j, s);
            }
            res = std::max(res, std::abs(acc));
          }
  return res;
}

double compatibility_residual(const ConnectionField& conn,
                              const ProductField& c, const Point& p,
                              const FdScheme& fd) {
  const int n = c.n;
  const Christoffel g = conn(p);
  const Tensor3 t = c.structure(p);
  std::vector<Tensor3> dt(n);
  for (int d = 0; d < n; ++d) dt[d] = c.partial(p, d, fd);

  // nabla_l c^i_{jk}
  auto cov = [&](int l, int i, int j, int k) {
    double v = dt[l](i, j, k);
    for (int s = 0; s < n; ++s) {
      v += g.at(i, l, s) * t(s, j, k);
      v -= g.at(s, l, j) * t(i, s, k);
      v -= g.at(s, l, k) * t(i, j, s);
    }
    return v;
  };

  double res = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          res = std::max(res, std::abs(cov(l, i, j, k) - cov(j, i, l, k)));
  return res;
}

double parallel_vector_residual(const ConnectionField& conn,
                                const VectorField& x, const Point& p,
                                const FdScheme& fd) {
  const Christoffel g = conn(p);
  const int n = g.dim();
  const Vec xv = x.value(p);
  const Vec jac = vector_field_jacobian(x, p, fd);
  double res = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = jac[i * n + j];
      for (int s = 0; s < n; ++s) v += g.at(i, j, s) * xv[s];
      res = std::max(res, std::abs(v));
    }
  return res;
}

double almost_equivalence_residual(const Christoffel& g1,
                                   const Christoffel& g2) {
  const int n = g1.dim();
  double res = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      res = std::max(res, std::abs(g1.at(i, i, j) - g2.at(i, i, j)));
    }
  return res;
}

double almost_equivalence_residual(const ConnectionField& conn1,
                                   const ConnectionField& conn2,
                                   const Point& p) {
  return almost_equivalence_residual(conn1(p), conn2(p));
}

}  // namespace biflat
