#include "biflat/eigen.hpp"

#include <algorithm>
#include <cmath>

namespace biflat {

namespace {

constexpr double kEps = 2.22e-16;

// Householder reduction to upper Hessenberg form (in place).
void hessenberg(MatC& a) {
  const int n = a.dim();
  for (int k = 0; k < n - 2; ++k) {
    double scale = 0.0;
    for (int i = k + 1; i < n; ++i) scale += std::abs(a(i, k));
    if (scale == 0.0) continue;

    std::vector<Cplx> v(n, Cplx(0.0));
    double norm2 = 0.0;
    for (int i = k + 1; i < n; ++i) {
      v[i] = a(i, k) / scale;
      norm2 += std::norm(v[i]);
    }
    double alpha = std::sqrt(norm2);
    if (alpha == 0.0) continue;
    Cplx phase = (std::abs(v[k + 1]) > 0.0)
                     ? v[k + 1] / std::abs(v[k + 1])
                     : Cplx(1.0);
    v[k + 1] += phase * alpha;
    double vnorm2 = 0.0;
    for (int i = k + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
    if (vnorm2 == 0.0) continue;

    // A <- (I - 2 v v^H / v^H v) A
    for (int j = k; j < n; ++j) {
      Cplx s(0.0);
      for (int i = k + 1; i < n; ++i) s += std::conj(v[i]) * a(i, j);
      s *= 2.0 / vnorm2;
      for (int i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
    }
    // A <- A (I - 2 v v^H / v^H v)
    for (int i = 0; i < n; ++i) {
      Cplx s(0.0);
      for (int j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      s *= 2.0 / vnorm2;
      for (int j = k + 1; j < n; ++j) a(i, j) -= s * std::conj(v[j]);
    }
    for (int i = k + 2; i < n; ++i) a(i, k) = Cplx(0.0);
  }
}

// Eigenvalues of the trailing/active 2x2 block.
std::pair<Cplx, Cplx> eig2(Cplx a, Cplx b, Cplx c, Cplx d) {
  const Cplx m = 0.5 * (a + d);
  const Cplx disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
  return {m + disc, m - disc};
}

}  // namespace

MatC to_complex(const MatD& m) {
  MatC c(m.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) c(i, j) = Cplx(m(i, j), 0.0);
  return c;
}

std::vector<Cplx> eigenvalues(MatC a) {
  const int n = a.dim();
  std::vector<Cplx> ev;
  ev.reserve(n);
  if (n == 0) return ev;
  if (n == 1) return {a(0, 0)};

  hessenberg(a);

  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) anorm = std::max(anorm, std::abs(a(i, j)));
  if (anorm == 0.0) anorm = 1.0;

  int hi = n - 1;
  int iter_total = 0;
  const int max_iter = 60 * n;

  while (hi >= 0) {
    if (hi == 0) {
      ev.push_back(a(0, 0));
      break;
    }
    // Find the active block [lo, hi] above the last negligible subdiagonal.
    int lo = hi;
    while (lo > 0) {
      const double sub = std::abs(a(lo, lo - 1));
      const double diag = std::abs(a(lo - 1, lo - 1)) + std::abs(a(lo, lo));
      if (sub <= kEps * std::max(diag, anorm * kEps)) {
        a(lo, lo - 1) = Cplx(0.0);
        break;
      }
      --lo;
    }
    if (lo == hi) {
      ev.push_back(a(hi, hi));
      --hi;
      continue;
    }
    if (hi - lo == 1) {
      auto [l1, l2] = eig2(a(lo, lo), a(lo, hi), a(hi, lo), a(hi, hi));
      ev.push_back(l1);
      ev.push_back(l2);
      hi = lo - 1;
      continue;
    }

    if (++iter_total > max_iter)
      throw NumericError("eigenvalues: QR iteration did not converge");

    // Wilkinson shift from the trailing 2x2 of the active block.
    auto [s1, s2] = eig2(a(hi - 1, hi - 1), a(hi - 1, hi), a(hi, hi - 1),
                         a(hi, hi));
    Cplx shift = (std::abs(s1 - a(hi, hi)) < std::abs(s2 - a(hi, hi))) ? s1
                                                                       : s2;
    if (iter_total % 17 == 0) {
      // Exceptional shift to break rare stagnation cycles.
      shift = Cplx(std::abs(a(hi, hi - 1)) + std::abs(a(hi - 1, hi - 2)), 0.0);
    }

    // Explicitly shifted QR sweep on the active block via Givens rotations:
    // factor Q R = A - shift I, form R Q, add the shift back.
    for (int i = lo; i <= hi; ++i) a(i, i) -= shift;

    std::vector<Cplx> cs(hi + 1, Cplx(1.0)), sn(hi + 1, Cplx(0.0));
    for (int k = lo; k < hi; ++k) {
      const Cplx x = a(k, k);
      const Cplx y = a(k + 1, k);
      const double r = std::hypot(std::abs(x), std::abs(y));
      if (r > 0.0) {
        cs[k] = x / r;
        sn[k] = y / r;
      }
      for (int j = k; j <= hi; ++j) {
        const Cplx t1 = a(k, j), t2 = a(k + 1, j);
        a(k, j) = std::conj(cs[k]) * t1 + std::conj(sn[k]) * t2;
        a(k + 1, j) = -sn[k] * t1 + cs[k] * t2;
      }
    }
    for (int k = lo; k < hi; ++k) {
      for (int i = lo; i <= std::min(hi, k + 2); ++i) {
        const Cplx t1 = a(i, k), t2 = a(i, k + 1);
        a(i, k) = t1 * cs[k] + t2 * sn[k];
        a(i, k + 1) = -t1 * std::conj(sn[k]) + t2 * std::conj(cs[k]);
      }
    }
    for (int i = lo; i <= hi; ++i) a(i, i) += shift;
  }

  std::sort(ev.begin(), ev.end(), [](const Cplx& p, const Cplx& q) {
    if (p.real() != q.real()) return p.real() < q.real();
    return p.imag() < q.imag();
  });
  return ev;
}

std::vector<Cplx> eigenvector(const MatC& a, Cplx lambda) {
  const int n = a.dim();
  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) anorm = std::max(anorm, std::abs(a(i, j)));
  if (anorm == 0.0) anorm = 1.0;

  // Perturb the shift slightly so (A - lambda I) is safely invertible even
  // at an exact eigenvalue; inverse iteration still converges to the
  // eigenvector.
  const Cplx mu = lambda + Cplx(anorm * 1e-13, anorm * 1e-13);

  MatC b(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = a(i, j) - (i == j ? mu : Cplx(0.0));

  // LU with partial pivoting.
  std::vector<int> piv(n);
  for (int i = 0; i < n; ++i) piv[i] = i;
  for (int k = 0; k < n; ++k) {
    int pr = k;
    double pm = std::abs(b(k, k));
    for (int i = k + 1; i < n; ++i)
      if (std::abs(b(i, k)) > pm) {
        pm = std::abs(b(i, k));
        pr = i;
      }
    if (pm == 0.0) {
      b(k, k) = Cplx(anorm * 1e-300 + 1e-300, 0.0);
      continue;
    }
    if (pr != k) {
      for (int j = 0; j < n; ++j) std::swap(b(k, j), b(pr, j));
      std::swap(piv[k], piv[pr]);
    }
    for (int i = k + 1; i < n; ++i) {
      b(i, k) /= b(k, k);
      for (int j = k + 1; j < n; ++j) b(i, j) -= b(i, k) * b(k, j);
    }
  }

  auto solve = [&](std::vector<Cplx> rhs) {
    std::vector<Cplx> x(n);
    for (int i = 0; i < n; ++i) x[i] = rhs[piv[i]];
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < i; ++k) x[i] -= b(i, k) * x[k];
    for (int i = n - 1; i >= 0; --i) {
      for (int k = i + 1; k < n; ++k) x[i] -= b(i, k) * x[k];
      x[i] /= b(i, i);
    }
    return x;
  };

  std::vector<Cplx> v(n, Cplx(1.0));
  for (int it = 0; it < 4; ++it) {
    v = solve(std::move(v));
    double m = 0.0;
    for (const Cplx& c : v) m = std::max(m, std::abs(c));
    if (m == 0.0) throw NumericError("eigenvector: inverse iteration failed");
    for (Cplx& c : v) c /= m;
  }

  // Deterministic phase: make the largest component real positive.
  int imax = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
  Cplx phase = std::abs(v[imax]) > 0.0 ? v[imax] / std::abs(v[imax])
                                       : Cplx(1.0);
  double norm = 0.0;
  for (const Cplx& c : v) norm += std::norm(c);
  norm = std::sqrt(norm);
  for (Cplx& c : v) c /= phase * norm;
  return v;
}

EigenDecomposition eigen_decompose(const MatD& m) {
  EigenDecomposition out;
  MatC a = to_complex(m);
  out.values = eigenvalues(a);
  const int n = m.rows();
  for (const Cplx& lam : out.values) {
    auto v = eigenvector(a, lam);
    double res = 0.0;
    for (int i = 0; i < n; ++i) {
      Cplx r(0.0);
      for (int j = 0; j < n; ++j) r += a(i, j) * v[j];
      r -= lam * v[i];
      res = std::max(res, std::abs(r));
    }
    out.residual = std::max(out.residual, res);
    out.vectors.push_back(std::move(v));
  }
  return out;
}

std::vector<Cplx> cubic_roots(double b2, double b1, double b0) {
  std::vector<Cplx> roots;
  if (b0 == 0.0) {
    // Exact deflation of the zero root; the remaining quadratic is solved
    // in closed form, so a double root comes out exact.
    roots.push_back(Cplx(0.0));
    const Cplx half = Cplx(-0.5 * b2, 0.0);
    const Cplx disc = std::sqrt(Cplx(0.25 * b2 * b2 - b1, 0.0));
    roots.push_back(half + disc);
    roots.push_back(half - disc);
  } else {
    MatD comp(3, 3);
    comp(0, 2) = -b0;
    comp(1, 0) = 1.0;
    comp(1, 2) = -b1;
    comp(2, 1) = 1.0;
    comp(2, 2) = -b2;
    roots = eigenvalues(to_complex(comp));
    // Newton polish.
    for (Cplx& r : roots) {
      for (int it = 0; it < 2; ++it) {
        const Cplx p = ((r + b2) * r + b1) * r + b0;
        const Cplx dp = (3.0 * r + 2.0 * b2) * r + b1;
        if (std::abs(dp) > 0.0) r -= p / dp;
      }
    }
  }
  std::sort(roots.begin(), roots.end(), [](const Cplx& p, const Cplx& q) {
    if (p.real() != q.real()) return p.real() < q.real();
    return p.imag() < q.imag();
  });
  return roots;
}

}  // namespace biflat
