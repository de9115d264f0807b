#include "biflat/darboux.hpp"

namespace biflat {

double RotationField::beta(int i, int j, const Point& p) const {
  if (i == j) throw DomainError("rotation coefficients are off-diagonal only");
  require_admissible(p, separation, false);
  return value(i, j, p);
}

double RotationField::dbeta(int i, int j, int k, const Point& p,
                            const FdScheme& fd, PartialMode mode) const {
  if (mode == PartialMode::Analytic && partial) return partial(i, j, k, p);
  FdScheme scheme = fd;
  scheme.scale = fd_scale;
  return scheme.partial(
      [this, i, j](const Point& q) { return value(i, j, q); }, p, k);
}

double LameField::coeff(int i, const Point& p) const {
  const double h = value(i, p);
  if (!std::isfinite(h)) throw NumericError("Lame coefficient not finite");
  return h;
}

double LameField::dcoeff(int i, int j, const Point& p, const FdScheme& fd,
                         PartialMode mode) const {
  if (mode == PartialMode::Analytic && partial) return partial(i, j, p);
  FdScheme scheme = fd;
  scheme.scale = fd_scale;
  return scheme.partial([this, i](const Point& q) { return value(i, q); }, p,
                        j);
}

DeResiduals de_residuals(const RotationField& beta, const Point& p,
                         const FdScheme& fd, PartialMode mode) {
  const int n = beta.n;
  require_admissible(p, beta.separation, false);

  // db[k][i][j] = d_k beta_ij
  std::vector<MatD> db(n, MatD(n, n));
  MatD b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      b(i, j) = beta.value(i, j, p);
      for (int k = 0; k < n; ++k) db[k](i, j) = beta.dbeta(i, j, k, p, fd, mode);
    }

  DeResiduals out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        out.ed1 = std::max(out.ed1, std::abs(db[k](i, j) - b(i, k) * b(k, j)));
      }
      double e_der = 0.0, euler_der = 0.0;
      for (int l = 0; l < n; ++l) {
        e_der += db[l](i, j);
        euler_der += p.u[l] * db[l](i, j);
      }
      out.ed2 = std::max(out.ed2, std::abs(e_der));
      out.ed3 = std::max(out.ed3, std::abs(euler_der + b(i, j)));
    }
  return out;
}

LameResiduals lame_residuals(const RotationField& beta, const LameField& lame,
                             const Point& p, const FdScheme& fd,
                             PartialMode mode) {
  const int n = lame.n;
  require_admissible(p, beta.separation, false);

  Vec h(n);
  MatD dh(n, n);  // dh(j, i) = d_j H_i
  for (int i = 0; i < n; ++i) {
    h[i] = lame.coeff(i, p);
    for (int j = 0; j < n; ++j) dh(j, i) = lame.dcoeff(i, j, p, fd, mode);
  }

  LameResiduals out;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      out.l1 = std::max(out.l1,
                        std::abs(dh(j, i) - beta.value(i, j, p) * h[j]));
    }
    double e_der = 0.0, euler_der = 0.0;
    for (int l = 0; l < n; ++l) {
      e_der += dh(l, i);
      euler_der += p.u[l] * dh(l, i);
    }
    out.l2 = std::max(out.l2, std::abs(e_der));
    if (lame.homogeneity) {
      const double target =
          lame.homogeneity->sign * lame.homogeneity->degree * h[i];
      const double r = std::abs(euler_der - target);
      out.l3 = std::max(out.l3.value_or(0.0), r);
    }
  }
  return out;
}

namespace {

// Gamma^i_{ij} = (H_j / H_i) beta_ij, the entries shared verbatim by the
// natural and dual builders; almost equivalence is exact because of this.
MatD leading_entries(const RotationField& beta, const LameField& lame,
                     const Point& p) {
  const int n = beta.n;
  require_admissible(p, beta.separation, false);
  Vec h(n);
  for (int i = 0; i < n; ++i) {
    h[i] = lame.coeff(i, p);
    if (std::abs(h[i]) < lame.floor)
      throw DegeneracyError("Lame coefficient below floor at index " +
                            std::to_string(i + 1));
  }
  MatD g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      g(i, j) = (h[j] / h[i]) * beta.value(i, j, p);
    }
  return g;
}

}  // namespace

Christoffel natural_connection(const RotationField& beta, const LameField& lame,
                               const Point& p) {
  const int n = beta.n;
  const MatD lead = leading_entries(beta, lame, p);
  Christoffel g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      g.at(i, i, j) = lead(i, j);
      g.at(i, j, i) = lead(i, j);
      g.at(i, j, j) = -lead(i, j);
    }
    double diag = 0.0;
    for (int l = 0; l < n; ++l)
      if (l != i) diag += g.at(i, l, i);
    g.at(i, i, i) = -diag;
  }
  return g;
}

Christoffel dual_connection(const RotationField& beta, const LameField& lame,
                            const Point& p) {
  const int n = beta.n;
  require_admissible(p, beta.separation, true);
  const MatD lead = leading_entries(beta, lame, p);
  Christoffel g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      g.at(i, i, j) = lead(i, j);
      g.at(i, j, i) = lead(i, j);
      g.at(i, j, j) = -(p.u[i] / p.u[j]) * lead(i, j);
    }
    double diag = 0.0;
    for (int l = 0; l < n; ++l)
      if (l != i) diag += (p.u[l] / p.u[i]) * g.at(i, l, i);
    g.at(i, i, i) = -diag - 1.0 / p.u[i];
  }
  return g;
}

ConnectionField natural_connection_field(const RotationField& beta,
                                         const LameField& lame) {
  return [beta, lame](const Point& p) {
    return natural_connection(beta, lame, p);
  };
}

ConnectionField dual_connection_field(const RotationField& beta,
                                      const LameField& lame) {
  return [beta, lame](const Point& p) { return dual_connection(beta, lame, p); };
}

ConnectionField shifted_connection_field(const ConnectionField& conn,
                                         const ProductField& c) {
  return [conn, c](const Point& p) {
    Christoffel g = conn(p);
    const Tensor3 t = c.structure(p);
    const int n = g.dim();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) g.at(i, j, k) += t(i, j, k);
    return g;
  };
}

VMatrixResult v_matrix(const RotationField& beta, const Point& p) {
  const int n = beta.n;
  require_admissible(p, beta.separation, false);
  VMatrixResult out;
  out.v = MatD(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      out.v(i, j) = (p.u[j] - p.u[i]) * beta.value(i, j, p);
    }
  out.eigen = eigen_decompose(out.v);

  // Real matrix: the spectrum must be closed under conjugation.
  std::vector<Cplx> vals = out.eigen.values;
  for (const Cplx& lam : vals) {
    double best = std::numeric_limits<double>::infinity();
    for (const Cplx& mu : vals)
      best = std::min(best, std::abs(std::conj(lam) - mu));
    out.conjugation_residual = std::max(out.conjugation_residual, best);
  }
  return out;
}

FlatFormResult flat_form_and_closedness(const LameField& adjoint,
                                        const LameField& lame, const Point& p,
                                        const FdScheme& fd, PartialMode mode) {
  const int n = lame.n;
  Vec h(n), k(n);
  MatD dh(n, n), dk(n, n);  // (j, i) = d_j of coefficient i
  for (int i = 0; i < n; ++i) {
    h[i] = lame.coeff(i, p);
    k[i] = adjoint.coeff(i, p);
    for (int j = 0; j < n; ++j) {
      dh(j, i) = lame.dcoeff(i, j, p, fd, mode);
      dk(j, i) = adjoint.dcoeff(i, j, p, fd, mode);
    }
  }

  FlatFormResult out;
  out.omega.resize(n);
  for (int i = 0; i < n; ++i) out.omega[i] = k[i] * h[i];

  MatD domega(n, n);  // (j, i) = d_j omega_i
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      domega(j, i) = dk(j, i) * h[i] + k[i] * dh(j, i);

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      out.closedness =
          std::max(out.closedness, std::abs(domega(j, i) - domega(i, j)));

  // Natural-connection entries recovered from the Lame partials:
  // Gamma^i_{ij} = d_j H_i / H_i.
  auto lead = [&](int i, int j) { return dh(j, i) / h[i]; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = domega(j, i);
      if (j != i) {
        // nonzero Gamma^s_{ji}: s = i and s = j
        v -= lead(i, j) * out.omega[i];
        v -= lead(j, i) * out.omega[j];
      } else {
        // Gamma^s_{ii} = -Gamma^s_{si} (s != i), Gamma^i_{ii} = -sum Gamma^i_{li}
        for (int s = 0; s < n; ++s) {
          if (s == i) continue;
          v += lead(s, i) * out.omega[s];
          v += lead(i, s) * out.omega[i];
        }
      }
      out.covariant = std::max(out.covariant, std::abs(v));
    }
  return out;
}

}  // namespace biflat
