// Acceptance suite: one pass/fail line per criterion, every tolerance
// pinned in code.  Exit code 0 only when all criteria pass.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "biflat/darboux.hpp"
#include "biflat/hierarchy.hpp"
#include "biflat/models.hpp"
#include "biflat/painleve.hpp"
#include "biflat/rng.hpp"

using namespace biflat;

namespace {

struct Criterion {
  std::string label;
  bool pass = true;
  std::vector<std::string> notes;

  void require(const std::string& what, double value, double tolerance) {
    const bool ok = value <= tolerance;
    pass = pass && ok;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s%s = %.3e (tol %.1e)",
                  ok ? "" : "VIOLATION: ", what.c_str(), value, tolerance);
    notes.push_back(buf);
  }

  void require_true(const std::string& what, bool ok) {
    pass = pass && ok;
    notes.push_back((ok ? what + ": ok" : "VIOLATION: " + what));
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// -------------------------------------------------------------------------
// 1. epsilon-system suite.
// -------------------------------------------------------------------------

Criterion criterion_epsilon_suite() {
  Criterion c;
  c.label =
      "criterion 1: epsilon-system suite (n in {3,4,5}, eps in {0.5,-0.25}, "
      "100 points)";
  const auto t0 = std::chrono::steady_clock::now();
  FdScheme fd;

  double ed = 0.0, lame_res = 0.0, riem_nat = 0.0, riem_dual = 0.0;
  double par_e = 0.0, par_euler = 0.0, almost = 0.0, hm = 0.0, compat = 0.0;

  Rng rng(20240601);
  for (int n : {3, 4, 5}) {
    for (double eps : {0.5, -0.25}) {
      const EpsilonModel model{n, eps, kDefaultSeparation};
      const auto [beta, lame] = epsilon_fields(model);
      const ConnectionField nat = natural_connection_field(beta, lame);
      const ConnectionField dual = dual_connection_field(beta, lame);
      const ProductField canon = canonical_product(n);
      const ProductField dualp = dual_product(n);
      const VectorField e = unit_vector_field(n);
      const VectorField euler = euler_vector_field(n);

      for (int k = 0; k < 100; ++k) {
        const Point u = sample_point(rng, n, -2.0, 2.0, 0.2, true);
        const DeResiduals de = de_residuals(beta, u, fd, PartialMode::ForceFd);
        ed = std::max(ed, de.max_abs());
        const LameResiduals lr =
            lame_residuals(beta, lame, u, fd, PartialMode::ForceFd);
        lame_res = std::max({lame_res, lr.l1, lr.l2, lr.l3.value_or(0.0)});
        riem_nat = std::max(riem_nat, riemann_max_abs(nat, u, fd));
        riem_dual = std::max(riem_dual, riemann_max_abs(dual, u, fd));
        par_e = std::max(par_e, parallel_vector_residual(nat, e, u, fd));
        par_euler =
            std::max(par_euler, parallel_vector_residual(dual, euler, u, fd));
        almost = std::max(almost, almost_equivalence_residual(nat, dual, u));
        hm = std::max(hm, hertling_manin_residual(canon, u, fd));
        hm = std::max(hm, hertling_manin_residual(dualp, u, fd));
        compat = std::max(compat, compatibility_residual(nat, canon, u, fd));
        compat = std::max(compat, compatibility_residual(dual, dualp, u, fd));
      }
    }
  }

  c.require("max ED1-ED3", ed, 1e-7);
  c.require("max L1-L3", lame_res, 1e-7);
  c.require("max natural curvature", riem_nat, 1e-6);
  c.require("max dual curvature", riem_dual, 1e-6);
  c.require("max nabla1 e", par_e, 1e-10);
  c.require("max nabla2 E", par_euler, 1e-10);
  c.require("almost equivalence (exact)", almost, 0.0);
  c.require("max Hertling-Manin", hm, 1e-7);
  c.require("max compatibility", compat, 1e-7);
  const double dt = seconds_since(t0);
  c.require("runtime [s]", dt, 30.0);
  return c;
}

// -------------------------------------------------------------------------
// 2. n = 2 exact values.
// -------------------------------------------------------------------------

Criterion criterion_n2_exact() {
  Criterion c;
  c.label =
      "criterion 2: n=2 exact values (V-matrix, bi-flat family, closed form "
      "vs numeric)";
  FdScheme fd;
  const N2Model m{1.0, -4.0, kDefaultSeparation};
  const RotationField beta = n2_rotation(m);

  // V = [[0, -C1], [C2, 0]]
  const VMatrixResult vm = v_matrix(beta, Point{2.0, 1.0});
  double ventries = std::max(
      {std::abs(vm.v(0, 0)), std::abs(vm.v(1, 1)),
       std::abs(vm.v(0, 1) + m.c1), std::abs(vm.v(1, 0) - m.c2)});
  c.require("V-matrix entries vs [[0,-C1],[C2,0]]", ventries, 1e-14);

  // lambda^2 = -C1 C2 = 4 -> eigenvalues +-2
  double lam = 0.0;
  for (const Cplx& v : vm.eigen.values)
    lam = std::max(lam, std::abs(v * v - Cplx(4.0, 0.0)));
  c.require("lambda^2 + C1 C2", lam, 1e-10);
  c.require("eigenvalues vs -2, +2",
            std::max(std::abs(vm.eigen.values[0] - Cplx(-2.0, 0.0)),
                     std::abs(vm.eigen.values[1] - Cplx(2.0, 0.0))),
            1e-10);

  // bi-flat family: Gamma^1_12 = -d/(u^2-u^1) to 1e-12, both flat < 1e-7.
  const N2Biflat bf = n2_biflat(m);
  Rng rng(4102);
  double gamma_dev = 0.0, flat_nat = 0.0, flat_dual = 0.0;
  const ConnectionField natf = natural_connection_field(bf.beta, bf.lame);
  const ConnectionField dualf = dual_connection_field(bf.beta, bf.lame);
  for (int k = 0; k < 20; ++k) {
    const double u2 = rng.uniform(-2.0, 2.0);
    Point u{u2 + rng.uniform(0.3, 2.0), u2};
    if (std::abs(u.u[0]) < 0.25 || std::abs(u.u[1]) < 0.25) {
      u.u[0] += 0.6;
      u.u[1] += 0.6;
    }
    const Christoffel g = natural_connection(bf.beta, bf.lame, u);
    const double g112 = n2_biflat_expected_gamma112(bf, u);
    const double g221 = n2_biflat_expected_gamma221(bf, u);
    const double scale = std::max({std::abs(g112), std::abs(g221), 1.0});
    gamma_dev = std::max(gamma_dev,
                         std::abs(g.at(0, 0, 1) - g112) / scale);
    gamma_dev = std::max(gamma_dev,
                         std::abs(g.at(1, 1, 0) - g221) / scale);
  }
  flat_nat = riemann_max_abs(natf, Point{3.0, 1.0}, fd);
  flat_dual = riemann_max_abs(dualf, Point{3.0, 1.0}, fd);
  c.require("Gamma^1_12 = -d/(u2-u1), Gamma^2_21 = d/(u2-u1)", gamma_dev,
            1e-12);
  c.require("bi-flat natural curvature at (3,1)", flat_nat, 1e-7);
  c.require("bi-flat dual curvature at (3,1)", flat_dual, 1e-7);

  // closed-form dual family vs numeric solution on [0.1, 0.9]; b = a/2
  // members stay O(1) on the interval so the absolute tolerance is sharp.
  double ode_dev = 0.0;
  for (double d : {2.0, 1.6, 0.8}) {
    const N2SpecialDual s{d, 1.0, 0.5};
    N2OdeDual opts;
    opts.d = d;
    opts.z0 = 0.5;
    opts.f0 = n2_special_f(s, 0.5);
    opts.fp0 = n2_special_fp(s, 0.5);
    opts.zlo = 0.1;
    opts.zhi = 0.9;
    const N2OdeSolution sol = n2_dual_ode_solve(m, opts);
    for (int k = 0; k <= 160; ++k) {
      const double z = 0.1 + 0.8 * k / 160.0;
      ode_dev = std::max(ode_dev,
                         std::abs(sol.eval_f(z) - n2_special_f(s, z)));
    }
  }
  c.require("closed form vs numeric solution", ode_dev, 1e-8);
  return c;
}

// -------------------------------------------------------------------------
// 3. Painleve pipeline.
// -------------------------------------------------------------------------

double min_radicand(const pvi::SigmaData& sd) {
  double m = 1e300;
  for (const pvi::SigmaSample& s : sd.samples) {
    m = std::min(m, std::abs(s.fp));
    m = std::min(m, std::abs(s.f - s.z * s.fp - sd.r2));
    m = std::min(m, std::abs((s.z - 1.0) * s.fp - s.f));
  }
  return m;
}

Criterion criterion_painleve() {
  Criterion c;
  c.label =
      "criterion 3: Painleve pipeline (20 seeded trajectories on [0.4, 0.6])";
  const auto t0 = std::chrono::steady_clock::now();
  FdScheme fd;

  double drift = 0.0, sigma_res = 0.0, beta_res = 0.0, roundtrip = 0.0;
  double vieta = 0.0;
  Rng rng(777);
  int accepted = 0, tried = 0;
  while (accepted < 20) {
    if (++tried > 200) {
      c.require_true("could not find 20 non-degenerate seeds", false);
      break;
    }
    pvi::FState s0;
    s0.z = 0.4;
    for (double& v : s0.f) v = rng.uniform(0.3, 1.2);
    const pvi::TrajectoryN3 traj = pvi::integrate(s0, 0.6);
    const pvi::SigmaData sd = pvi::sigma_data_from_trajectory(traj);
    if (min_radicand(sd) < 0.05) continue;  // avoid branch degeneracies
    ++accepted;

    drift = std::max({drift, traj.drift_minus_r2, traj.drift_dconst});
    for (const pvi::SigmaSample& s : sd.samples)
      sigma_res = std::max(sigma_res, pvi::sigma_residual(s.z, s.f, s.fp,
                                                          s.fpp, sd.r2,
                                                          sd.dconst));
    vieta = std::max(vieta, sd.vieta_residual);

    // reconstructed rotation coefficients on u-space
    const RotationField beta = pvi::beta_from_trajectory(traj);
    for (const Point& u : {Point{0.0, 1.0, 0.45}, Point{0.0, 1.0, 0.55},
                           Point{-0.7, 0.9, 0.14}}) {
      const DeResiduals de = de_residuals(beta, u, fd, PartialMode::ForceFd);
      beta_res = std::max(beta_res, de.max_abs());
    }

    // inverse map round trip
    const pvi::ReconstructionConstants rc =
        pvi::solve_reconstruction_constants(sd, 0.5);
    const pvi::Reconstructed rec =
        pvi::reconstruct_trajectory(sd, rc, 0.4, 0.6);
    for (size_t k = 0; k < rec.z.size(); ++k) {
      const auto expect = traj.sample(rec.z[k]);
      for (int q = 0; q < 6; ++q)
        roundtrip = std::max(roundtrip,
                             std::abs(rec.f[k][q] - expect[q]));
    }
  }

  c.require("max invariant drift", drift, 1e-9);
  c.require("max sigma-form residual", sigma_res, 1e-6);
  c.require("max reconstructed-beta ED residual", beta_res, 1e-6);
  c.require("max round-trip sup error", roundtrip, 1e-6);
  c.require("max Vieta residual", vieta, 1e-10);

  // symmetric initial data: F stays symmetric and D = 0
  {
    pvi::FState s0;
    s0.z = 0.4;
    s0.f = {0.9, 0.4, 0.9, -0.3, 0.4, -0.3};
    const pvi::TrajectoryN3 traj = pvi::integrate(s0, 0.6);
    double asym = 0.0, dmax = 0.0;
    for (const auto& f : traj.f) {
      asym = std::max({asym, std::abs(f[pvi::P12] - f[pvi::P21]),
                       std::abs(f[pvi::P13] - f[pvi::P31]),
                       std::abs(f[pvi::P23] - f[pvi::P32])});
      dmax = std::max(dmax, std::abs(pvi::invariants(f).dconst));
    }
    c.require("symmetric data asymmetry", asym, 1e-10);
    c.require("symmetric data |D|", dmax, 1e-10);
  }

  // D = 0 parameter cubic: roots {0, R^2, R^2} to 1e-12
  {
    double dev = 0.0;
    for (double r2 : {0.7, 1.9, -2.4}) {
      const auto roots = pvi::painleve_parameters(r2, 0.0, nullptr);
      std::array<Cplx, 3> expect{Cplx(0.0), Cplx(r2), Cplx(r2)};
      std::sort(expect.begin(), expect.end(),
                [](const Cplx& a, const Cplx& b) {
                  return a.real() != b.real() ? a.real() < b.real()
                                              : a.imag() < b.imag();
                });
      for (int i = 0; i < 3; ++i)
        dev = std::max(dev, std::abs(roots[i] - expect[i]));
    }
    c.require("D = 0 roots vs {0, R^2, R^2}", dev, 1e-12);
  }

  const double dt = seconds_since(t0);
  c.require("runtime [s]", dt, 60.0);
  return c;
}

// -------------------------------------------------------------------------
// 4. hierarchy.
// -------------------------------------------------------------------------

Criterion criterion_hierarchy() {
  Criterion c;
  c.label =
      "criterion 4: hierarchy (symmetries, recursion steps, flow commutator)";
  FdScheme fd;
  const EpsilonModel model{3, 0.5, kDefaultSeparation};
  const auto [beta, lame] = epsilon_fields(model);
  const ConnectionField nat = natural_connection_field(beta, lame);
  const ConnectionField dual = dual_connection_field(beta, lame);
  const ProductField canon = canonical_product(3);
  const VectorField e = unit_vector_field(3);
  const VectorField euler = euler_vector_field(3);
  const VectorField vel = epsilon_velocity(model);

  // symmetry residual of the characteristic velocities at 50 points
  double sym = 0.0;
  Rng rng(999);
  for (int k = 0; k < 50; ++k) {
    const Point u = sample_point(rng, 3, -2.0, 2.0, 0.2, false);
    sym = std::max(sym, hier::symmetry_residual(nat, canon, vel, u, fd));
  }
  c.require("epsilon velocities symmetry residual (50 pts)", sym, 1e-9);

  // one principal and one dual step: path independence + output symmetry
  const Point base{1.0, 2.0, 3.2};
  const Point target{1.3, 2.5, 3.9};
  const Point mid{1.1, 2.1, 4.1};
  for (auto scheme : {hier::RecursionScheme::Principal,
                      hier::RecursionScheme::Dual}) {
    const bool principal = scheme == hier::RecursionScheme::Principal;
    const Vec x_base =
        principal ? Vec{0.0, 0.0, 0.0} : Vec{1.0, 0.5, -0.25};
    const Vec direct = hier::recursion_step(scheme, nat, dual, canon, euler,
                                            e, base, x_base, target, fd);
    const Vec via =
        hier::recursion_step_path(scheme, nat, dual, canon, euler, e,
                                  {base, mid, target}, x_base, fd);
    double path_dev = 0.0;
    for (int i = 0; i < 3; ++i)
      path_dev = std::max(path_dev, std::abs(direct[i] - via[i]));
    const VectorField x1 = hier::recursion_step_field(
        scheme, nat, dual, canon, euler, e, base, x_base, fd);
    const double out_sym =
        hier::symmetry_residual(nat, canon, x1, target, fd);
    const std::string tag = principal ? "principal" : "dual";
    c.require(tag + " step path independence", path_dev, 1e-7);
    c.require(tag + " step output symmetry residual", out_sym, 1e-6);
  }

  // commutator of the epsilon flow with the unit translation
  hier::GridState g = hier::make_grid(3, 128, 1.0, {0.3, 0.9, 1.5},
                                      {0.02, 0.016, 0.024}, {0.0, 1.3, 2.1});
  Vec diffs;
  const double order =
      hier::commutator_order(canon, vel, e, g, 0.1, 1, 2, &diffs);
  const double worst_ratio =
      std::min(diffs[0] / diffs[1], diffs[1] / diffs[2]);
  c.require("commutator ratio deficit (>= 6 per halving)",
            std::max(0.0, 6.0 - worst_ratio), 0.0);
  c.require("commutator order deficit (>= 2.5)", std::max(0.0, 2.5 - order),
            0.0);
  return c;
}

// -------------------------------------------------------------------------
// 5. negative controls.
// -------------------------------------------------------------------------

Criterion criterion_negative_controls() {
  Criterion c;
  c.label = "criterion 5: negative controls";
  FdScheme fd;

  // perturbing beta by 1e-3 noise must break at least one ED residual
  const EpsilonModel model{3, 0.5, kDefaultSeparation};
  const RotationField beta = epsilon_rotation(model);
  Rng rng(4242);
  MatD noise(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double mag = rng.uniform(0.5e-3, 1e-3);
      noise(i, j) = rng.uniform01() < 0.5 ? -mag : mag;
    }
  RotationField perturbed = beta;
  perturbed.partial = nullptr;
  perturbed.value = [beta, noise](int i, int j, const Point& p) {
    return beta.value(i, j, p) + noise(i, j);
  };
  const DeResiduals de =
      de_residuals(perturbed, Point{1.0, 2.0, 4.0}, fd, PartialMode::ForceFd);
  c.require_true("perturbed beta breaks an ED residual (> 1e-4)",
                 de.max_abs() > 1e-4);

  // a non-symmetry flow must fail the commutator convergence order
  hier::GridState g = hier::make_grid(3, 128, 1.0, {0.3, 0.9, 1.5},
                                      {0.02, 0.016, 0.024}, {0.0, 1.3, 2.1});
  VectorField bad;
  bad.label = "non-symmetry";
  bad.value = [](const Point& q) {
    return Vec{std::sin(q.u[0]), q.u[1] * q.u[2], std::cos(q.u[2])};
  };
  const double order = hier::commutator_order(
      canonical_product(3), epsilon_velocity(model), bad, g, 0.1, 1, 2);
  c.require_true("non-symmetry flow fails the order fit (< 2.5)",
                 order < 2.5);
  return c;
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Criterion> results;
  results.push_back(criterion_epsilon_suite());
  results.push_back(criterion_n2_exact());
  results.push_back(criterion_painleve());
  results.push_back(criterion_hierarchy());
  results.push_back(criterion_negative_controls());

  bool all = true;
  for (const Criterion& c : results) {
    std::printf("[%s] %s\n", c.pass ? "PASS" : "FAIL", c.label.c_str());
    for (const std::string& n : c.notes) std::printf("    %s\n", n.c_str());
    all = all && c.pass;
  }
  std::printf("%s (%.1f s total)\n",
              all ? "ACCEPTANCE: all criteria passed"
                  : "ACCEPTANCE: FAILURES PRESENT",
              seconds_since(t0));
  return all ? 0 : 1;
}
