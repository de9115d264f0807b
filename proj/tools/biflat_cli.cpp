// Command-line front end: model construction, verification suites,
// trajectory runs, the sigma-form maps and hierarchy diagnostics.
// Exit codes: 0 all checks pass, 1 residual over tolerance (report still
// written), 2 invalid input / domain error.

#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "biflat/darboux.hpp"
#include "biflat/hierarchy.hpp"
#include "biflat/models.hpp"
#include "biflat/painleve.hpp"
#include "biflat/report.hpp"
#include "biflat/rng.hpp"
#include "biflat/version.hpp"

using namespace biflat;

namespace {

// ---------------------------------------------------------------------------
// Shared plumbing.
// ---------------------------------------------------------------------------

struct Output {
  std::string report_path;
  std::string csv_path;
};

int finish(const std::string& command, const std::string& provenance,
           const Tolerances& tol, std::optional<uint64_t> seed,
           std::vector<ResidualReport> checks, const Output& out,
           const Json& extra = Json::object()) {
  ReportHeader header;
  header.command = command;
  header.model_provenance = provenance;
  header.tolerances = tol;
  header.seed = seed;
  Json report = make_report(header, checks);
  if (!extra.empty()) report["results"] = extra;
  if (!out.report_path.empty()) write_report_atomic(out.report_path, report);
  std::cout << report.dump(2) << "\n";
  return report_passes(report) ? 0 : 1;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
  if (path.empty()) return;
  std::string body = header;
  body += '\n';
  for (const std::string& r : rows) {
    body += r;
    body += '\n';
  }
  write_text_atomic(path, body);
}

std::array<double, 6> parse_six(const std::string& csv) {
  std::array<double, 6> out{};
  std::stringstream ss(csv);
  std::string item;
  int k = 0;
  while (std::getline(ss, item, ',')) {
    if (k >= 6) throw ManifestError("expected exactly 6 values in " + csv);
    out[k++] = std::stod(item);
  }
  if (k != 6) throw ManifestError("expected exactly 6 values in " + csv);
  return out;
}

Point parse_point(const std::string& csv) {
  Point p;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) p.u.push_back(std::stod(item));
  return p;
}

Json complex_list(const std::vector<Cplx>& vals) {
  Json arr = Json::array();
  for (const Cplx& v : vals) arr.push_back({{"re", v.real()}, {"im", v.imag()}});
  return arr;
}

// Track the max residual of a named check across sample points.
class Aggregate {
 public:
  explicit Aggregate(std::vector<std::string> filter = {})
      : filter_(std::move(filter)) {}

  void add(const std::string& name, double value, double tolerance,
           const Point& p) {
    if (!filter_.empty() &&
        std::find(filter_.begin(), filter_.end(), name) == filter_.end())
      return;
    auto it = worst_.find(name);
    if (it == worst_.end() || value > it->second.value) {
      ResidualReport r = ResidualReport::make(name, value, tolerance, p);
      worst_[name] = r;
      if (it == worst_.end()) order_.push_back(name);
    }
  }

  std::vector<ResidualReport> reports() const {
    std::vector<ResidualReport> out;
    for (const std::string& n : order_) out.push_back(worst_.at(n));
    return out;
  }

 private:
  std::vector<std::string> filter_;
  std::map<std::string, ResidualReport> worst_;
  std::vector<std::string> order_;
};

// ---------------------------------------------------------------------------
// verify: the full bi-flat suite for a model at sampled points.
// ---------------------------------------------------------------------------

struct VerifyParams {
  std::string model = "epsilon";  // epsilon | n2-biflat
  int n = 3;
  double eps = 0.5;
  double c1 = 1.0, c2 = -4.0;
  int branch = +1;
  int points = 100;
  uint64_t seed = 0;
  double sample_margin = 0.2;  // rejection margin for sampled points
  std::string degree_sign;     // "", "minus" or "plus": overrides the tag
  std::vector<std::string> checks;  // empty -> run everything
  std::string point;                // fixed point instead of sampling
  Tolerances tol;
  Output out;
};

void apply_degree_sign(LameField& lame, const std::string& token) {
  if (token.empty()) return;
  if (!lame.homogeneity)
    throw ManifestError("--degree-sign given but the family carries no degree");
  if (token == "minus")
    lame.homogeneity->sign = -1;
  else if (token == "plus")
    lame.homogeneity->sign = +1;
  else
    throw ManifestError("--degree-sign must be 'minus' or 'plus'");
}

int run_verify(const VerifyParams& p) {
  RotationField beta;
  LameField lame;
  std::string provenance;
  int n = 0;
  if (p.model == "epsilon") {
    const EpsilonModel model{p.n, p.eps, kDefaultSeparation};
    std::tie(beta, lame) = epsilon_fields(model);
    provenance = beta.provenance;
    n = p.n;
  } else if (p.model == "n2-biflat") {
    const N2Biflat bf = n2_biflat(N2Model{p.c1, p.c2, kDefaultSeparation},
                                  p.branch);
    beta = bf.beta;
    lame = bf.lame;
    provenance = lame.provenance;
    n = 2;
  } else {
    throw ManifestError("unknown model '" + p.model + "'");
  }
  apply_degree_sign(lame, p.degree_sign);

  const ConnectionField nat = natural_connection_field(beta, lame);
  const ConnectionField dual = dual_connection_field(beta, lame);
  const ProductField canon = canonical_product(n);
  const ProductField dualp = dual_product(n);
  const VectorField e = unit_vector_field(n);
  const VectorField euler = euler_vector_field(n);
  FdScheme fd;

  Aggregate agg(p.checks);
  Rng rng(p.seed);
  const bool fixed = !p.point.empty();
  const Point fixed_point = fixed ? parse_point(p.point) : Point{};
  const int rounds = fixed ? 1 : p.points;
  for (int k = 0; k < rounds; ++k) {
    const Point u =
        fixed ? fixed_point
              : sample_point(rng, n, -2.0, 2.0, p.sample_margin, true);
    const DeResiduals de = de_residuals(beta, u, fd, PartialMode::ForceFd);
    agg.add("ED1", de.ed1, p.tol.fd, u);
    agg.add("ED2", de.ed2, p.tol.fd, u);
    agg.add("ED3", de.ed3, p.tol.fd, u);
    const LameResiduals lr =
        lame_residuals(beta, lame, u, fd, PartialMode::ForceFd);
    agg.add("L1", lr.l1, p.tol.fd, u);
    agg.add("L2", lr.l2, p.tol.fd, u);
    if (lr.l3) agg.add("L3", *lr.l3, p.tol.fd, u);
    agg.add("riemann_natural", riemann_max_abs(nat, u, fd), p.tol.fd, u);
    agg.add("riemann_dual", riemann_max_abs(dual, u, fd), p.tol.fd, u);
    agg.add("hertling_manin_canonical",
            hertling_manin_residual(canon, u, fd), p.tol.fd, u);
    agg.add("hertling_manin_dual", hertling_manin_residual(dualp, u, fd),
            p.tol.fd, u);
    agg.add("compat_natural_canonical",
            compatibility_residual(nat, canon, u, fd), p.tol.fd, u);
    agg.add("compat_dual_dual", compatibility_residual(dual, dualp, u, fd),
            p.tol.fd, u);
    agg.add("parallel_unit_natural",
            parallel_vector_residual(nat, e, u, fd), p.tol.algebraic, u);
    agg.add("parallel_euler_dual",
            parallel_vector_residual(dual, euler, u, fd), p.tol.algebraic, u);
    agg.add("almost_equivalence", almost_equivalence_residual(nat, dual, u),
            0.0, u);
  }
  return finish("verify", provenance, p.tol, p.seed, agg.reports(), p.out);
}

// ---------------------------------------------------------------------------
// models epsilon / models n2.
// ---------------------------------------------------------------------------

int run_models_epsilon(const VerifyParams& p) {
  const EpsilonModel model{p.n, p.eps, kDefaultSeparation};
  auto [beta, lame] = epsilon_fields(model);
  apply_degree_sign(lame, p.degree_sign);
  FdScheme fd;
  Aggregate agg;
  Rng rng(p.seed);
  for (int k = 0; k < p.points; ++k) {
    const Point u = sample_point(rng, p.n, -2.0, 2.0, p.sample_margin, true);
    const DeResiduals de = de_residuals(beta, u, fd, PartialMode::ForceFd);
    agg.add("ED_max", de.max_abs(), p.tol.fd, u);
    const LameResiduals lr =
        lame_residuals(beta, lame, u, fd, PartialMode::ForceFd);
    agg.add("L_max", std::max({lr.l1, lr.l2, lr.l3.value_or(0.0)}), p.tol.fd,
            u);
    // connection entries against the closed form eps/(u^i - u^j)
    const Christoffel g = natural_connection(beta, lame, u);
    double worst = 0.0;
    for (int i = 0; i < p.n; ++i)
      for (int j = 0; j < p.n; ++j)
        if (i != j)
          worst = std::max(worst, std::abs(g.at(i, i, j) -
                                           p.eps / (u.u[i] - u.u[j])));
    agg.add("gamma_closed_form", worst, p.tol.algebraic, u);

    // V H = -(n-1) eps H
    const VMatrixResult vm = v_matrix(beta, u);
    const double d = (p.n - 1) * p.eps;
    double eig_rel = 0.0;
    for (int i = 0; i < p.n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < p.n; ++j) acc += vm.v(i, j) * lame.coeff(j, u);
      eig_rel = std::max(eig_rel, std::abs(acc + d * lame.coeff(i, u)));
    }
    agg.add("v_eigen_relation", eig_rel, p.tol.algebraic, u);

    // spectrum = {-(n-1) eps, eps (n-1 times)} as a sorted multiset
    std::vector<double> expected(p.n, p.eps);
    expected[0] = -d;
    std::sort(expected.begin(), expected.end());
    double spec = 0.0;
    for (int i = 0; i < p.n; ++i)
      spec = std::max(spec,
                      std::abs(vm.eigen.values[i] - Cplx(expected[i], 0.0)));
    agg.add("v_spectrum", spec, 1e-8, u);
  }
  return finish("models-epsilon", beta.provenance, p.tol, p.seed,
                agg.reports(), p.out);
}

struct N2Params {
  double c1 = 1.0, c2 = -4.0;
  double a = 1.0, b = 0.5;
  double d = 2.0;
  int branch = +1;
  int points = 20;
  uint64_t seed = 0;
  Tolerances tol;
  Output out;
};

int run_models_n2(const N2Params& p) {
  const N2Model model{p.c1, p.c2, kDefaultSeparation};
  const RotationField beta = n2_rotation(model);
  FdScheme fd;
  Aggregate agg;
  Rng rng(p.seed);
  Json extra;

  if (p.c1 * p.c2 > 0.0 && p.c1 != 0.0) {
    const LameField h = n2_natural_lame(model, p.a, p.b);
    for (int k = 0; k < p.points; ++k) {
      const double u2 = rng.uniform(-1.5, 1.5);
      const Point u{u2 + rng.uniform(0.2, 2.0), u2};
      const LameResiduals lr = lame_residuals(beta, h, u, fd);
      agg.add("natural_L1", lr.l1, 1e-9, u);
      agg.add("natural_L2", lr.l2, 1e-9, u);
    }
  }

  if (-p.c1 * p.c2 > 0.0) {
    const N2Biflat bf = n2_biflat(model, p.branch);
    extra["biflat_degree"] = bf.degree;
    const ConnectionField nat = natural_connection_field(bf.beta, bf.lame);
    const ConnectionField dual = dual_connection_field(bf.beta, bf.lame);
    for (int k = 0; k < p.points; ++k) {
      const double u2 = rng.uniform(-2.0, 2.0);
      Point u{u2 + rng.uniform(0.3, 2.0), u2};
      if (std::abs(u.u[0]) < 0.2 || std::abs(u.u[1]) < 0.2) {
        u.u[0] += 0.5;
        u.u[1] += 0.5;
      }
      const Christoffel g = natural_connection(bf.beta, bf.lame, u);
      const double g112 = n2_biflat_expected_gamma112(bf, u);
      const double g221 = n2_biflat_expected_gamma221(bf, u);
      const double scale = std::max(std::abs(g112), 1.0);
      agg.add("biflat_gamma112", std::abs(g.at(0, 0, 1) - g112) / scale,
              1e-12, u);
      agg.add("biflat_gamma221", std::abs(g.at(1, 1, 0) - g221) / scale,
              1e-12, u);
      agg.add("biflat_riemann_natural", riemann_max_abs(nat, u, fd), 1e-7, u);
      agg.add("biflat_riemann_dual", riemann_max_abs(dual, u, fd), 1e-7, u);
    }
    // lambda^2 = -C1 C2 through the V-matrix
    const VMatrixResult vm = v_matrix(bf.beta, Point{2.0, 1.0});
    double lam = 0.0;
    for (const Cplx& v : vm.eigen.values)
      lam = std::max(lam, std::abs(v * v - Cplx(-p.c1 * p.c2, 0.0)));
    agg.add("lambda_squared", lam, 1e-10, Point{2.0, 1.0});
    extra["v_eigenvalues"] = complex_list(vm.eigen.values);
  }

  if (p.c1 == 1.0 && p.c2 == -4.0) {
    // closed form against the numeric solution of the second-order equation
    const N2SpecialDual s{p.d, p.a, p.b};
    N2OdeDual opts;
    opts.d = s.d;
    opts.z0 = 0.5;
    opts.f0 = n2_special_f(s, 0.5);
    opts.fp0 = n2_special_fp(s, 0.5);
    opts.zlo = 0.1;
    opts.zhi = 0.9;
    const N2OdeSolution sol = n2_dual_ode_solve(model, opts);
    double worst = 0.0;
    for (int k = 0; k <= 160; ++k) {
      const double z = 0.1 + 0.8 * k / 160.0;
      worst = std::max(worst, std::abs(sol.eval_f(z) - n2_special_f(s, z)));
    }
    agg.add("special_vs_ode", worst, 1e-8, Point{0.5, 0.0});
  }

  return finish("models-n2", beta.provenance, p.tol, p.seed, agg.reports(),
                p.out, extra);
}

// ---------------------------------------------------------------------------
// ode3 / painleve.
// ---------------------------------------------------------------------------

struct TrajectoryParams {
  double z0 = 0.4, z1 = 0.6;
  std::array<double, 6> f0{1, 1, 1, 1, 1, 1};
  double tol_ode = 1e-10;
  double max_drift = 1e-9;
  double zc = 0.0;  // reconstruction anchor; 0 -> midpoint
  uint64_t seed = 0;
  Tolerances tol;
  Output out;
};

std::vector<std::string> trajectory_rows(const pvi::TrajectoryN3& traj,
                                         const pvi::SigmaData& sd) {
  std::vector<std::string> rows;
  for (size_t k = 0; k < traj.z.size(); ++k) {
    const pvi::SigmaSample s = sd.samples[k];
    const double res =
        pvi::sigma_residual(s.z, s.f, s.fp, s.fpp, sd.r2, sd.dconst);
    const pvi::Invariants inv = pvi::invariants(traj.f[k]);
    rows.push_back(csv_line({traj.z[k], traj.f[k][pvi::P12],
                             traj.f[k][pvi::P13], traj.f[k][pvi::P21],
                             traj.f[k][pvi::P23], traj.f[k][pvi::P31],
                             traj.f[k][pvi::P32], inv.minus_r2, inv.dconst,
                             res}));
  }
  return rows;
}

constexpr const char* kTrajectoryHeader =
    "z,F12,F13,F21,F23,F31,F32,mR2,D,sigma_res";

int run_ode3_integrate(const TrajectoryParams& p, bool check_sigma,
                       const std::string& command) {
  pvi::FState s0;
  s0.z = p.z0;
  s0.f = p.f0;
  pvi::IntegrateOptions opts;
  opts.abs_tol = opts.rel_tol = p.tol_ode;
  opts.max_drift = p.max_drift;
  const pvi::TrajectoryN3 traj = pvi::integrate(s0, p.z1, opts);
  const pvi::SigmaData sd = pvi::sigma_data_from_trajectory(traj);

  write_csv(p.out.csv_path, kTrajectoryHeader, trajectory_rows(traj, sd));

  std::vector<ResidualReport> checks;
  const Point z0pt{p.z0, p.z1};
  checks.push_back(ResidualReport::make("invariant_drift_mR2",
                                        traj.drift_minus_r2, p.max_drift,
                                        z0pt));
  checks.push_back(ResidualReport::make("invariant_drift_D", traj.drift_dconst,
                                        p.max_drift, z0pt));
  Json extra;
  extra["minus_r2"] = traj.initial.minus_r2;
  extra["D"] = traj.initial.dconst;
  extra["samples"] = traj.z.size();
  extra["integrator"] = {{"method", traj.method},
                         {"abs_tol", traj.opts.abs_tol},
                         {"rel_tol", traj.opts.rel_tol},
                         {"max_step", traj.opts.max_step}};
  if (check_sigma) {
    double worst = 0.0;
    for (const pvi::SigmaSample& s : sd.samples)
      worst = std::max(worst, pvi::sigma_residual(s.z, s.f, s.fp, s.fpp,
                                                  sd.r2, sd.dconst));
    checks.push_back(
        ResidualReport::make("sigma_residual", worst, p.tol.fd, z0pt));
    checks.push_back(ResidualReport::make("position_consistency",
                                          sd.consistency_residual,
                                          p.tol.algebraic, z0pt));
    extra["v_squared"] = complex_list(
        {sd.v_squared[0], sd.v_squared[1], sd.v_squared[2]});
    extra["vieta_residual"] = sd.vieta_residual;
  }
  return finish(command, "trajectory", p.tol, p.seed, checks, p.out, extra);
}

int run_ode3_invariants(const TrajectoryParams& p) {
  const pvi::Invariants inv = pvi::invariants(p.f0);
  Json extra;
  extra["minus_r2"] = inv.minus_r2;
  extra["D"] = inv.dconst;
  return finish("ode3-invariants", "state", p.tol, std::nullopt, {}, p.out,
                extra);
}

int run_painleve_reconstruct(const TrajectoryParams& p) {
  pvi::FState s0;
  s0.z = p.z0;
  s0.f = p.f0;
  pvi::IntegrateOptions opts;
  opts.abs_tol = opts.rel_tol = p.tol_ode;
  opts.max_drift = p.max_drift;
  const pvi::TrajectoryN3 traj = pvi::integrate(s0, p.z1, opts);
  const pvi::SigmaData sd = pvi::sigma_data_from_trajectory(traj);

  const double zc = p.zc != 0.0 ? p.zc : 0.5 * (p.z0 + p.z1);
  double match = 0.0;
  const pvi::ReconstructionConstants rc =
      pvi::solve_reconstruction_constants(sd, zc, &match);
  const pvi::Reconstructed rec =
      pvi::reconstruct_trajectory(sd, rc, traj.zlo(), traj.zhi());

  double sup = 0.0, inv_err = 0.0;
  std::vector<std::string> rows;
  for (size_t k = 0; k < rec.z.size(); ++k) {
    const auto expect = traj.sample(rec.z[k]);
    for (int c = 0; c < 6; ++c)
      sup = std::max(sup, std::abs(rec.f[k][c] - expect[c]));
    const pvi::Invariants inv = pvi::invariants(rec.f[k]);
    inv_err = std::max(inv_err, std::abs(inv.minus_r2 + sd.r2));
    inv_err = std::max(inv_err, std::abs(inv.dconst - sd.dconst));
    rows.push_back(csv_line({rec.z[k], rec.f[k][0], rec.f[k][1], rec.f[k][2],
                             rec.f[k][3], rec.f[k][4], rec.f[k][5]}));
  }
  write_csv(p.out.csv_path, "z,F12,F13,F21,F23,F31,F32", rows);

  const Point z0pt{p.z0, p.z1};
  std::vector<ResidualReport> checks;
  checks.push_back(
      ResidualReport::make("constants_match", match, 1e-8, z0pt));
  checks.push_back(ResidualReport::make("roundtrip_sup", sup, p.tol.fd, z0pt));
  checks.push_back(
      ResidualReport::make("reconstructed_invariants", inv_err, 1e-8, z0pt));
  checks.push_back(
      ResidualReport::make("imaginary_residue", rec.max_imag, 1e-9, z0pt));
  Json extra;
  extra["anchor"] = zc;
  extra["constants"] = {{"A_re", rc.c[pvi::P21].real()},
                        {"A_im", rc.c[pvi::P21].imag()},
                        {"B_re", rc.c[pvi::P31].real()},
                        {"B_im", rc.c[pvi::P31].imag()}};
  return finish("painleve-reconstruct", "trajectory", p.tol, p.seed, checks,
                p.out, extra);
}

int run_painleve_params(double r2, double dconst, const Tolerances& tol,
                        const Output& out) {
  double vieta = 0.0;
  const auto roots = pvi::painleve_parameters(r2, dconst, &vieta);
  std::vector<ResidualReport> checks;
  checks.push_back(ResidualReport::make("vieta_residual", vieta, 1e-10,
                                        Point{r2, dconst}));
  Json extra;
  extra["v_squared"] = complex_list({roots[0], roots[1], roots[2]});
  return finish("painleve-params", "cubic", tol, std::nullopt, checks, out,
                extra);
}

// ---------------------------------------------------------------------------
// lame eigen.
// ---------------------------------------------------------------------------

struct EigenParams {
  std::string model = "n2";  // n2 | epsilon
  int n = 3;
  double eps = 0.5;
  double c1 = 1.0, c2 = -4.0;
  std::string point;
  Tolerances tol;
  Output out;
};

int run_lame_eigen(const EigenParams& p) {
  RotationField beta;
  Point u;
  std::string provenance;
  if (p.model == "n2") {
    beta = n2_rotation(N2Model{p.c1, p.c2, kDefaultSeparation});
    u = p.point.empty() ? Point{2.0, 1.0} : parse_point(p.point);
    provenance = beta.provenance;
  } else if (p.model == "epsilon") {
    beta = epsilon_rotation(EpsilonModel{p.n, p.eps, kDefaultSeparation});
    u = p.point.empty() ? Point{1.0, 2.0, 4.0} : parse_point(p.point);
    if (u.dim() != p.n)
      throw ManifestError("point dimension does not match --n");
    provenance = beta.provenance;
  } else {
    throw ManifestError("unknown model '" + p.model + "'");
  }

  const VMatrixResult vm = v_matrix(beta, u);
  std::vector<ResidualReport> checks;
  checks.push_back(ResidualReport::make("eigen_relation", vm.eigen.residual,
                                        p.tol.algebraic, u));
  checks.push_back(ResidualReport::make("conjugation_closure",
                                        vm.conjugation_residual,
                                        p.tol.algebraic, u));
  if (p.model == "n2") {
    double lam = 0.0;
    for (const Cplx& v : vm.eigen.values)
      lam = std::max(lam, std::abs(v * v - Cplx(-p.c1 * p.c2, 0.0)));
    checks.push_back(
        ResidualReport::make("lambda_squared_plus_c1c2", lam, 1e-10, u));
  }

  Json extra;
  extra["eigenvalues"] = complex_list(vm.eigen.values);
  Json vecs = Json::array();
  for (const auto& v : vm.eigen.vectors) vecs.push_back(complex_list(v));
  extra["eigenvectors"] = vecs;
  Json vm_rows = Json::array();
  for (int i = 0; i < vm.v.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < vm.v.cols(); ++j) row.push_back(vm.v(i, j));
    vm_rows.push_back(row);
  }
  extra["v_matrix"] = vm_rows;
  return finish("lame-eigen", provenance, p.tol, std::nullopt, checks, p.out,
                extra);
}

// ---------------------------------------------------------------------------
// hierarchy.
// ---------------------------------------------------------------------------

struct HierarchyParams {
  int n = 3;
  double eps = 0.5;
  std::string scheme = "principal";
  int points = 50;
  uint64_t seed = 0;
  int cells = 128;
  double dt0 = 0.1;
  int levels = 2;
  int steps = 1;
  double amplitude = 0.02;
  Tolerances tol;
  Output out;
};

int run_hierarchy_symmetry(const HierarchyParams& p) {
  const EpsilonModel model{p.n, p.eps, kDefaultSeparation};
  const auto [beta, lame] = epsilon_fields(model);
  const ConnectionField nat = natural_connection_field(beta, lame);
  const ProductField c = canonical_product(p.n);
  const VectorField x = epsilon_velocity(model);
  FdScheme fd;
  Aggregate agg;
  Rng rng(p.seed);
  for (int k = 0; k < p.points; ++k) {
    const Point u = sample_point(rng, p.n, -2.0, 2.0, 0.2, false);
    agg.add("symmetry_residual", hier::symmetry_residual(nat, c, x, u, fd),
            1e-9, u);
  }
  return finish("hierarchy-symmetry", beta.provenance, p.tol, p.seed,
                agg.reports(), p.out);
}

int run_hierarchy_recurse(const HierarchyParams& p) {
  const EpsilonModel model{p.n, p.eps, kDefaultSeparation};
  const auto [beta, lame] = epsilon_fields(model);
  const ConnectionField nat = natural_connection_field(beta, lame);
  const ConnectionField dual = dual_connection_field(beta, lame);
  const ProductField c = canonical_product(p.n);
  const VectorField e = unit_vector_field(p.n);
  const VectorField euler = euler_vector_field(p.n);
  FdScheme fd;

  hier::RecursionScheme scheme;
  ConnectionField conn2 = dual;
  if (p.scheme == "principal")
    scheme = hier::RecursionScheme::Principal;
  else if (p.scheme == "equivalent") {
    scheme = hier::RecursionScheme::Equivalent;
    conn2 = shifted_connection_field(nat, c);
  } else if (p.scheme == "dual")
    scheme = hier::RecursionScheme::Dual;
  else
    throw ManifestError("unknown scheme '" + p.scheme + "'");

  Rng rng(p.seed);
  Point base, target, mid;
  base.u.resize(p.n);
  target.u.resize(p.n);
  mid.u.resize(p.n);
  for (int i = 0; i < p.n; ++i) {
    base.u[i] = 1.0 + 1.1 * i;
    target.u[i] = base.u[i] + rng.uniform(0.2, 0.6);
    mid.u[i] = base.u[i] + rng.uniform(0.0, 0.8);
  }
  Vec x_base(p.n);
  for (int i = 0; i < p.n; ++i) x_base[i] = rng.uniform(-1.0, 1.0);

  const Vec direct = hier::recursion_step(scheme, nat, conn2, c, euler, e,
                                          base, x_base, target, fd);
  const Vec via = hier::recursion_step_path(scheme, nat, conn2, c, euler, e,
                                            {base, mid, target}, x_base, fd);
  double path_res = 0.0;
  for (int i = 0; i < p.n; ++i)
    path_res = std::max(path_res, std::abs(direct[i] - via[i]));

  const VectorField x1 = hier::recursion_step_field(scheme, nat, conn2, c,
                                                    euler, e, base, x_base, fd);
  const double sym =
      hier::symmetry_residual(nat, c, x1, target, fd);

  const bool resonant = hier::resonant_chain(
      {e, x1}, {base, target, mid});

  std::vector<ResidualReport> checks;
  checks.push_back(
      ResidualReport::make("path_independence", path_res, 1e-7, target));
  checks.push_back(ResidualReport::make("output_symmetry", sym, 1e-6, target));
  Json extra;
  extra["scheme"] = p.scheme;
  extra["resonant"] = resonant;
  extra["x_next"] = direct;
  return finish("hierarchy-recurse", beta.provenance, p.tol, p.seed, checks,
                p.out, extra);
}

int run_hierarchy_commute(const HierarchyParams& p) {
  const EpsilonModel model{p.n, p.eps, kDefaultSeparation};
  const ProductField c = canonical_product(p.n);
  Vec base(p.n), amp(p.n), phase(p.n);
  for (int i = 0; i < p.n; ++i) {
    base[i] = 0.3 + 0.6 * i;
    amp[i] = p.amplitude * (1.0 + 0.2 * i);
    phase[i] = 0.7 * i;
  }
  const hier::GridState g =
      hier::make_grid(p.n, p.cells, 1.0, base, amp, phase);
  hier::require_admissible_grid(g, 0.1);

  Vec diffs;
  const double order =
      hier::commutator_order(c, epsilon_velocity(model),
                             unit_vector_field(p.n), g, p.dt0, p.steps,
                             p.levels, &diffs);

  std::vector<std::string> rows;
  double dt = p.dt0;
  for (double d : diffs) {
    rows.push_back(csv_line({dt, d}));
    dt *= 0.5;
  }
  write_csv(p.out.csv_path, "dt,commutator_sup", rows);

  std::vector<ResidualReport> checks;
  checks.push_back(ResidualReport::make("order_deficit",
                                        std::max(0.0, 2.5 - order), 0.0,
                                        Point{p.dt0, double(p.cells)}));
  Json extra;
  extra["fitted_order"] = order;
  extra["differences"] = diffs;
  return finish("hierarchy-commute", "epsilon-flow vs unit-translation",
                p.tol, p.seed, checks, p.out, extra);
}

// ---------------------------------------------------------------------------
// Manifest dispatch.
// ---------------------------------------------------------------------------

int run_manifest(const std::string& path) {
  const Json m = load_manifest(path);
  if (!m.is_object() || !m.contains("command"))
    throw ManifestError("manifest needs a 'command' key");
  const std::string cmd = m["command"];
  const Tolerances tol = tolerances_from_env();

  using MF = ManifestField;
  auto out_of = [&](const Json& j) {
    Output o;
    o.report_path = j.value("output", "");
    o.csv_path = j.value("csv", "");
    return o;
  };

  if (cmd == "verify" || cmd == "models-epsilon") {
    validate_manifest(m,
                      {{"command", MF::String, true},
                       {"model", MF::String, false},
                       {"n", MF::Integer, false},
                       {"eps", MF::Number, false},
                       {"C1", MF::Number, false},
                       {"C2", MF::Number, false},
                       {"branch", MF::Integer, false},
                       {"points", MF::Integer, false},
                       {"seed", MF::Integer, true},
                       {"margin", MF::Number, false},
                       {"degree_sign", MF::String, false},
                       {"checks", MF::Array, false},
                       {"point", MF::Array, false},
                       {"tolerances", MF::Object, false},
                       {"output", MF::String, false},
                       {"csv", MF::String, false}},
                      cmd);
    VerifyParams p;
    p.model = m.value("model", "epsilon");
    p.n = m.value("n", 3);
    p.eps = m.value("eps", 0.5);
    p.c1 = m.value("C1", 1.0);
    p.c2 = m.value("C2", -4.0);
    p.branch = m.value("branch", 1);
    p.points = m.value("points", 100);
    p.seed = m["seed"].get<uint64_t>();
    p.sample_margin = m.value("margin", 0.2);
    p.degree_sign = m.value("degree_sign", "");
    if (m.contains("checks"))
      for (const auto& v : m["checks"])
        p.checks.push_back(v.get<std::string>());
    if (m.contains("point")) {
      std::string pt;
      for (const auto& v : m["point"]) {
        if (!pt.empty()) pt += ',';
        pt += format_double(v.get<double>());
      }
      p.point = pt;
    }
    p.tol = tol;
    if (m.contains("tolerances")) {
      p.tol.fd = m["tolerances"].value("fd", tol.fd);
      p.tol.algebraic = m["tolerances"].value("algebraic", tol.algebraic);
    }
    p.out = out_of(m);
    return cmd == "verify" ? run_verify(p) : run_models_epsilon(p);
  }
  if (cmd == "ode3-integrate" || cmd == "painleve-sigma" ||
      cmd == "painleve-reconstruct" || cmd == "ode3-invariants") {
    validate_manifest(m,
                      {{"command", MF::String, true},
                       {"z0", MF::Number, false},
                       {"z1", MF::Number, false},
                       {"F0", MF::Array, cmd != "ode3-invariants"},
                       {"tol", MF::Number, false},
                       {"max_drift", MF::Number, false},
                       {"anchor", MF::Number, false},
                       {"seed", MF::Integer, true},
                       {"output", MF::String, false},
                       {"csv", MF::String, false}},
                      cmd);
    TrajectoryParams p;
    p.z0 = m.value("z0", 0.4);
    p.z1 = m.value("z1", 0.6);
    if (m.contains("F0")) {
      const auto arr = m["F0"];
      if (arr.size() != 6)
        throw ManifestError("F0 must hold exactly six numbers");
      for (int i = 0; i < 6; ++i) p.f0[i] = arr[i].get<double>();
    }
    p.tol_ode = m.value("tol", 1e-10);
    p.max_drift = m.value("max_drift", 1e-9);
    p.zc = m.value("anchor", 0.0);
    p.seed = m["seed"].get<uint64_t>();
    p.tol = tol;
    p.out = out_of(m);
    if (cmd == "ode3-invariants") return run_ode3_invariants(p);
    if (cmd == "painleve-reconstruct") return run_painleve_reconstruct(p);
    return run_ode3_integrate(p, cmd == "painleve-sigma", cmd);
  }
  if (cmd == "models-n2") {
    validate_manifest(m,
                      {{"command", MF::String, true},
                       {"C1", MF::Number, true},
                       {"C2", MF::Number, true},
                       {"a", MF::Number, false},
                       {"b", MF::Number, false},
                       {"d", MF::Number, false},
                       {"branch", MF::Integer, false},
                       {"points", MF::Integer, false},
                       {"seed", MF::Integer, true},
                       {"output", MF::String, false}},
                      cmd);
    N2Params p;
    p.c1 = m["C1"].get<double>();
    p.c2 = m["C2"].get<double>();
    p.a = m.value("a", 1.0);
    p.b = m.value("b", 0.5);
    p.d = m.value("d", 2.0);
    p.branch = m.value("branch", 1);
    p.points = m.value("points", 20);
    p.seed = m["seed"].get<uint64_t>();
    p.tol = tol;
    p.out = out_of(m);
    return run_models_n2(p);
  }
  if (cmd == "painleve-params") {
    validate_manifest(m,
                      {{"command", MF::String, true},
                       {"R2", MF::Number, true},
                       {"D", MF::Number, true},
                       {"seed", MF::Integer, true},
                       {"output", MF::String, false}},
                      cmd);
    return run_painleve_params(m["R2"].get<double>(), m["D"].get<double>(),
                               tol, out_of(m));
  }
  if (cmd == "lame-eigen") {
    validate_manifest(m,
                      {{"command", MF::String, true},
                       {"model", MF::String, false},
                       {"n", MF::Integer, false},
                       {"eps", MF::Number, false},
                       {"C1", MF::Number, false},
                       {"C2", MF::Number, false},
                       {"point", MF::String, false},
                       {"seed", MF::Integer, true},
                       {"output", MF::String, false}},
                      cmd);
    EigenParams p;
    p.model = m.value("model", "n2");
    p.n = m.value("n", 3);
    p.eps = m.value("eps", 0.5);
    p.c1 = m.value("C1", 1.0);
    p.c2 = m.value("C2", -4.0);
    p.point = m.value("point", "");
    p.tol = tol;
    p.out = out_of(m);
    return run_lame_eigen(p);
  }
  if (cmd == "hierarchy-symmetry" || cmd == "hierarchy-recurse" ||
      cmd == "hierarchy-commute") {
    validate_manifest(m,
                      {{"command", MF::String, true},
                       {"n", MF::Integer, false},
                       {"eps", MF::Number, false},
                       {"scheme", MF::String, false},
                       {"points", MF::Integer, false},
                       {"m", MF::Integer, false},
                       {"dt", MF::Number, false},
                       {"levels", MF::Integer, false},
                       {"steps", MF::Integer, false},
                       {"amplitude", MF::Number, false},
                       {"seed", MF::Integer, true},
                       {"output", MF::String, false},
                       {"csv", MF::String, false}},
                      cmd);
    HierarchyParams p;
    p.n = m.value("n", 3);
    p.eps = m.value("eps", 0.5);
    p.scheme = m.value("scheme", "principal");
    p.points = m.value("points", 50);
    p.cells = m.value("m", 128);
    p.dt0 = m.value("dt", 0.1);
    p.levels = m.value("levels", 2);
    p.steps = m.value("steps", 1);
    p.amplitude = m.value("amplitude", 0.02);
    p.seed = m["seed"].get<uint64_t>();
    p.tol = tol;
    p.out = out_of(m);
    if (cmd == "hierarchy-symmetry") return run_hierarchy_symmetry(p);
    if (cmd == "hierarchy-recurse") return run_hierarchy_recurse(p);
    return run_hierarchy_commute(p);
  }
  throw ManifestError("unknown manifest command '" + cmd + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kToolName) +
               " - bi-flat structures from rotation coefficients"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  const Tolerances env_tol = tolerances_from_env();

  // --- verify ---
  VerifyParams vp;
  vp.tol = env_tol;
  auto* verify = app.add_subcommand("verify", "full bi-flat suite at points");
  verify->add_option("--model", vp.model, "epsilon | n2-biflat");
  verify->add_option("--n", vp.n, "dimension (epsilon model)");
  verify->add_option("--eps", vp.eps, "epsilon parameter");
  verify->add_option("--C1", vp.c1, "n2 constant C1");
  verify->add_option("--C2", vp.c2, "n2 constant C2");
  verify->add_option("--branch", vp.branch, "bi-flat degree branch (+1/-1)");
  verify->add_option("--points", vp.points, "number of sampled points");
  verify->add_option("--seed", vp.seed, "sampling seed")->required();
  verify->add_option("--margin", vp.sample_margin,
                     "rejection margin for sampling");
  verify->add_option("--checks", vp.checks,
                     "restrict to these named checks");
  verify->add_option("--point", vp.point,
                     "verify at this fixed point (comma-separated)");
  verify->add_option("--degree-sign", vp.degree_sign,
                     "override the Euler-equation sign convention of the "
                     "Lame family (minus: E(H) = -dH, plus: E(H) = +dH)");
  verify->add_option("--tol-fd", vp.tol.fd, "fd-based tolerance");
  verify->add_option("--tol-algebraic", vp.tol.algebraic,
                     "algebraic tolerance");
  verify->add_option("--output", vp.out.report_path, "report path");

  // --- models ---
  auto* models = app.add_subcommand("models", "closed-form families");
  models->require_subcommand(1);
  VerifyParams mep;
  mep.tol = env_tol;
  auto* meps = models->add_subcommand("epsilon", "epsilon-system family");
  meps->add_option("--n", mep.n)->required();
  meps->add_option("--eps", mep.eps)->required();
  meps->add_option("--points", mep.points);
  meps->add_option("--seed", mep.seed)->required();
  meps->add_option("--margin", mep.sample_margin);
  meps->add_option("--degree-sign", mep.degree_sign,
                   "override the Euler-equation sign convention");
  meps->add_option("--output", mep.out.report_path);

  N2Params n2p;
  n2p.tol = env_tol;
  auto* mn2 = models->add_subcommand("n2", "two-dimensional families");
  mn2->add_option("--C1", n2p.c1)->required();
  mn2->add_option("--C2", n2p.c2)->required();
  mn2->add_option("--a", n2p.a);
  mn2->add_option("--b", n2p.b);
  mn2->add_option("--d", n2p.d, "dual-family degree");
  mn2->add_option("--branch", n2p.branch);
  mn2->add_option("--points", n2p.points);
  mn2->add_option("--seed", n2p.seed)->required();
  mn2->add_option("--output", n2p.out.report_path);

  // --- ode3 ---
  auto* ode3 = app.add_subcommand("ode3", "six-coupling system runs");
  ode3->require_subcommand(1);
  TrajectoryParams tp;
  tp.tol = env_tol;
  std::string f0_csv = "1,1,1,1,1,1";
  auto* integ = ode3->add_subcommand("integrate", "adaptive integration");
  integ->add_option("--z0", tp.z0)->required();
  integ->add_option("--z1", tp.z1)->required();
  integ->add_option("--F0", f0_csv, "six comma-separated values")->required();
  integ->add_option("--tol", tp.tol_ode);
  integ->add_option("--max-drift", tp.max_drift);
  integ->add_option("--csv", tp.out.csv_path);
  integ->add_option("--output", tp.out.report_path);

  TrajectoryParams ip;
  ip.tol = env_tol;
  std::string inv_csv = "1,1,1,1,1,1";
  auto* invs = ode3->add_subcommand("invariants", "conserved quantities");
  invs->add_option("--F0", inv_csv)->required();
  invs->add_option("--output", ip.out.report_path);

  // --- painleve ---
  auto* pain = app.add_subcommand("painleve", "sigma-form pipeline");
  pain->require_subcommand(1);
  TrajectoryParams sp;
  sp.tol = env_tol;
  std::string sigma_f0 = "0.8,0.5,0.6,0.4,0.9,0.2";
  auto* sigma = pain->add_subcommand("sigma", "sigma-form residual run");
  sigma->add_option("--z0", sp.z0);
  sigma->add_option("--z1", sp.z1);
  sigma->add_option("--F0", sigma_f0);
  sigma->add_option("--tol", sp.tol_ode);
  sigma->add_option("--max-drift", sp.max_drift);
  sigma->add_option("--csv", sp.out.csv_path);
  sigma->add_option("--output", sp.out.report_path);

  TrajectoryParams rp;
  rp.tol = env_tol;
  std::string rec_f0 = "0.8,0.5,0.6,0.4,0.9,0.2";
  auto* rec = pain->add_subcommand("reconstruct", "two-constant inverse map");
  rec->add_option("--z0", rp.z0);
  rec->add_option("--z1", rp.z1);
  rec->add_option("--F0", rec_f0);
  rec->add_option("--anchor", rp.zc, "anchor z for the constants");
  rec->add_option("--csv", rp.out.csv_path);
  rec->add_option("--output", rp.out.report_path);

  double pr2 = 1.0, pd = 0.5;
  Output pout;
  auto* par = pain->add_subcommand("params", "parameter cubic roots");
  par->add_option("--R2", pr2)->required();
  par->add_option("--D", pd)->required();
  par->add_option("--output", pout.report_path);

  // --- lame eigen ---
  auto* lame_cmd = app.add_subcommand("lame", "Lame coefficient machinery");
  lame_cmd->require_subcommand(1);
  EigenParams ep;
  ep.tol = env_tol;
  auto* eig = lame_cmd->add_subcommand("eigen", "V-matrix eigenproblem");
  eig->add_option("--model", ep.model, "n2 | epsilon");
  eig->add_option("--n", ep.n);
  eig->add_option("--eps", ep.eps);
  eig->add_option("--C1", ep.c1);
  eig->add_option("--C2", ep.c2);
  eig->add_option("--point", ep.point, "comma-separated coordinates");
  eig->add_option("--output", ep.out.report_path);

  // --- hierarchy ---
  auto* hierc = app.add_subcommand("hierarchy", "symmetries and flows");
  hierc->require_subcommand(1);
  HierarchyParams hp;
  hp.tol = env_tol;
  auto* hsym = hierc->add_subcommand("symmetry", "symmetry-equation residual");
  hsym->add_option("--n", hp.n);
  hsym->add_option("--eps", hp.eps);
  hsym->add_option("--points", hp.points);
  hsym->add_option("--seed", hp.seed)->required();
  hsym->add_option("--output", hp.out.report_path);

  HierarchyParams hr;
  hr.tol = env_tol;
  auto* hrec = hierc->add_subcommand("recurse", "one recursion step");
  hrec->add_option("--scheme", hr.scheme, "principal | equivalent | dual");
  hrec->add_option("--n", hr.n);
  hrec->add_option("--eps", hr.eps);
  hrec->add_option("--seed", hr.seed)->required();
  hrec->add_option("--output", hr.out.report_path);

  HierarchyParams hc;
  hc.tol = env_tol;
  auto* hcom = hierc->add_subcommand("commute", "flow commutator order");
  hcom->add_option("--n", hc.n);
  hcom->add_option("--eps", hc.eps);
  hcom->add_option("--m", hc.cells, "grid cells");
  hcom->add_option("--dt", hc.dt0, "coarsest time step");
  hcom->add_option("--levels", hc.levels, "number of halvings");
  hcom->add_option("--steps", hc.steps, "rk4 steps per flow");
  hcom->add_option("--amplitude", hc.amplitude, "initial-data amplitude");
  hcom->add_option("--csv", hc.out.csv_path);
  hcom->add_option("--output", hc.out.report_path);

  // --- run (manifest) ---
  std::string manifest_path;
  auto* runc = app.add_subcommand("run", "execute a JSON manifest");
  runc->add_option("manifest", manifest_path, "manifest path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) return run_verify(vp);
    if (meps->parsed()) return run_models_epsilon(mep);
    if (mn2->parsed()) return run_models_n2(n2p);
    if (integ->parsed()) {
      tp.f0 = parse_six(f0_csv);
      return run_ode3_integrate(tp, false, "ode3-integrate");
    }
    if (invs->parsed()) {
      ip.f0 = parse_six(inv_csv);
      return run_ode3_invariants(ip);
    }
    if (sigma->parsed()) {
      sp.f0 = parse_six(sigma_f0);
      return run_ode3_integrate(sp, true, "painleve-sigma");
    }
    if (rec->parsed()) {
      rp.f0 = parse_six(rec_f0);
      return run_painleve_reconstruct(rp);
    }
    if (par->parsed()) return run_painleve_params(pr2, pd, env_tol, pout);
    if (eig->parsed()) return run_lame_eigen(ep);
    if (hsym->parsed()) return run_hierarchy_symmetry(hp);
    if (hrec->parsed()) return run_hierarchy_recurse(hr);
    if (hcom->parsed()) return run_hierarchy_commute(hc);
    if (runc->parsed()) return run_manifest(manifest_path);
  } catch (const ManifestError& e) {
    std::cerr << "manifest error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
