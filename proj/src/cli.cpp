#include "momrec/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "momrec/rng.hpp"

namespace momrec::cli {

namespace {

double env_double(const char* name, double fallback) {
  const char* v = std::getenv(name);
  if (!v) return fallback;
  char* end = nullptr;
  double x = std::strtod(v, &end);
  return (end && *end == '\0' && x > 0) ? x : fallback;
}

}  // namespace

void apply_env_overrides(HierarchyOptions& opt) {
  opt.sdp.feas_tol = env_double("MOMREC_FEAS_TOL", opt.sdp.feas_tol);
  opt.sdp.gap_tol = env_double("MOMREC_GAP_TOL", opt.sdp.gap_tol);
  opt.tol.rank_tol = env_double("MOMREC_RANK_TOL", opt.tol.rank_tol);
}

namespace {

int outcome_exit_code(RecoveryOutcome o) {
  switch (o) {
    case RecoveryOutcome::Recovered: return 0;
    case RecoveryOutcome::NoFlatTruncation: return 2;
    case RecoveryOutcome::Infeasible: return 3;
    case RecoveryOutcome::SolverFailure: return 4;
  }
  return 4;
}

ResultFile run_problem(const ProblemFile& p, const HierarchyOptions& opt) {
  ResultFile r;
  r.kind = p.kind;
  r.n = p.n;
  r.d = p.d;
  r.seed = opt.seed;
  auto t0 = std::chrono::steady_clock::now();
  if (p.kind == "mrp") {
    MrpProblem prob{p.K, p.functionals};
    MrpResult res = run_hierarchy(prob, opt);
    r.outcome = res.report.outcome;
    r.report = std::move(res.report);
    if (res.measure) {
      Decomposition dec;
      dec.n = p.n;
      dec.d = std::max(1, prob.data_degree());
      for (int i = 0; i < res.measure->r(); ++i)
        dec.terms.push_back({+1, res.measure->weights[i], res.measure->atoms[i]});
      r.dec = std::move(dec);
    }
  } else if (p.kind == "trp-positive") {
    TensorRecovery res = recover_positive(p.K, p.functionals, p.d, opt);
    r.outcome = res.report.outcome;
    r.report = std::move(res.report);
    r.dec = std::move(res.dec);
  } else {
    TensorRecovery res = recover_general(p.K, p.functionals, p.d, opt);
    r.outcome = res.report.outcome;
    r.report = std::move(res.report);
    r.dec = std::move(res.dec);
  }
  auto t1 = std::chrono::steady_clock::now();
  r.timing_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  if (r.dec) {
    r.functional_residual = residual(*r.dec, p.functionals);
    for (const auto& t : r.dec->terms)
      r.membership_residual = std::max(r.membership_residual,
                                       p.K.membership_residual(t.atom));
  }
  return r;
}

}  // namespace

int cmd_solve(const std::string& problem_path, const SolveFlags& flags,
              std::ostream& out, std::ostream& err) {
  ProblemFile p;
  try {
    p = load_problem(problem_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  HierarchyOptions opt = p.options;
  apply_env_overrides(opt);
  if (flags.order_min > 0) opt.k_min = flags.order_min;
  if (flags.order_max > 0) opt.k_max = flags.order_max;
  if (flags.seed) opt.seed = *flags.seed;
  if (flags.tol) {
    opt.sdp.feas_tol = *flags.tol;
    opt.sdp.gap_tol = *flags.tol;
  }

  ResultFile r;
  try {
    r = run_problem(p, opt);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  nlohmann::json j = result_to_json(r, p);
  if (flags.out_path.empty()) {
    out << j.dump(2) << "\n";
  } else {
    std::ofstream f(flags.out_path);
    if (!f) {
      err << "error: cannot write " << flags.out_path << "\n";
      return 1;
    }
    f << j.dump(2) << "\n";
  }
  return outcome_exit_code(r.outcome);
}

int cmd_verify(const std::string& result_path, const std::string& problem_path,
               double tol, std::ostream& out, std::ostream& err) {
  ProblemFile p;
  ResultFile r;
  try {
    p = load_problem(problem_path);
    r = load_result(result_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  if (r.kind != p.kind || r.n != p.n || (p.kind != "mrp" && r.d != p.d)) {
    err << "error: result does not match the problem (kind/n/d differ)\n";
    return 1;
  }
  if (!r.dec) {
    err << "error: result carries no decomposition to verify\n";
    return 1;
  }
  double fres = residual(*r.dec, p.functionals);
  double mres = 0.0;
  for (const auto& t : r.dec->terms)
    mres = std::max(mres, p.K.membership_residual(t.atom));
  bool fpass = fres <= tol, mpass = mres <= tol;
  out << "functional residual " << std::scientific << std::setprecision(3) << fres
      << " (tol " << tol << "): " << (fpass ? "pass" : "FAIL") << "\n";
  out << "membership residual " << mres << " (tol " << tol
      << "): " << (mpass ? "pass" : "FAIL") << "\n";
  out << (fpass && mpass ? "verify: pass" : "verify: FAIL") << "\n";
  return fpass && mpass ? 0 : 2;
}

namespace {

Poly random_poly(Rng& rng, int n, int d) {
  auto basis = MonomialBasis::get(n, d);
  Poly p(n);
  for (int i = 0; i < basis->size(); ++i) p.add_term(basis->monomial(i), rng.normal());
  return p;
}

Eigen::VectorXd random_normal_vec(Rng& rng, int n) {
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u[i] = rng.normal();
  return u;
}

struct TrialOutcome {
  RecoveryOutcome outcome = RecoveryOutcome::SolverFailure;
  int r = -1;
  int k = -1;
  std::string note;
};

TrialOutcome bench_mrp_trial(const BenchFlags& flags, int trial) {
  Rng rng = Rng::derive(flags.seed, static_cast<std::uint64_t>(trial));
  const int n = flags.n, d = flags.d;
  SemialgebraicSet K = SemialgebraicSet::unit_sphere(n);

  // Instance data: y = sum c_i [u_i]_d with positive c and Gaussian points,
  // b_i = <a_i, y> for Gaussian polynomials a_i.
  const int N = static_cast<int>(binom(n + d, d));
  Tms y(n, d);
  for (int i = 0; i < N; ++i) {
    double c = std::abs(rng.normal());
    y.values += c * moment_vector(random_normal_vec(rng, n), d).values;
  }
  MrpProblem prob;
  prob.K = K;
  for (int i = 0; i < flags.m; ++i) {
    Poly a = random_poly(rng, n, d);
    prob.functionals.emplace_back(a, pair(a, y));
  }

  HierarchyOptions opt;
  opt.seed = flags.seed * 1000003ULL + trial;
  if (flags.k_max > 0) opt.k_max = flags.k_max;
  MrpResult res = run_hierarchy(prob, opt);
  TrialOutcome t;
  t.outcome = res.report.outcome;
  if (res.measure) t.r = res.measure->r();
  if (!res.report.orders.empty()) t.k = res.report.orders.back().k;
  return t;
}

TrialOutcome bench_trp_trial(const BenchFlags& flags, int trial) {
  Rng rng = Rng::derive(flags.seed ^ 0x7470ULL, static_cast<std::uint64_t>(trial));
  const int n = flags.n, d = flags.d;
  SemialgebraicSet K = SemialgebraicSet::unit_sphere(n);

  std::vector<std::pair<SymTensor, double>> ms;
  for (int i = 0; i < flags.m; ++i) {
    SymTensor F(n, d);
    for (int j = 0; j < F.size(); ++j) F.vals[j] = rng.normal();
    ms.emplace_back(std::move(F), 0.0);
  }
  auto fns = equations_to_functionals(ms);

  if (flags.b_normal) {
    for (auto& [f, b] : fns) b = rng.normal();
  } else {
    // Planted feasible data: a random signed decomposition on the sphere of
    // length ceil(m/2).
    Decomposition planted;
    planted.n = n;
    planted.d = d;
    int len = (flags.m + 1) / 2;
    for (int i = 0; i < len; ++i) {
      Eigen::VectorXd u = random_normal_vec(rng, n).normalized();
      double lam = std::abs(rng.normal()) + 0.1;
      int sign = rng.uniform() < 0.5 ? -1 : +1;
      planted.terms.push_back({sign, lam, u});
    }
    for (auto& [f, b] : fns) {
      b = 0.0;
      for (const auto& t : planted.terms) b += t.sign * t.weight * f.eval(t.atom);
    }
  }

  HierarchyOptions opt;
  opt.seed = flags.seed * 999983ULL + trial;
  if (flags.k_max > 0) opt.k_max = flags.k_max;
  TensorRecovery res = recover_general(K, fns, d, opt);
  TrialOutcome t;
  t.outcome = res.report.outcome;
  if (res.dec) t.r = res.dec->r();
  if (!res.report.orders.empty()) t.k = res.report.orders.back().k;
  return t;
}

}  // namespace

int cmd_bench(const BenchFlags& flags, std::ostream& out, std::ostream& err) {
  if (flags.n < 1 || flags.d < 1 || flags.m < 1 || flags.trials < 1) {
    err << "error: bench parameters must be positive\n";
    return 1;
  }
  if (flags.mode != "mrp" && flags.mode != "trp-general") {
    err << "error: bench mode must be 'mrp' or 'trp-general'\n";
    return 1;
  }
  std::vector<TrialOutcome> results(flags.trials);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int t = 0; t < flags.trials; ++t) {
    results[t] = flags.mode == "mrp" ? bench_mrp_trial(flags, t)
                                     : bench_trp_trial(flags, t);
  }

  int successes = 0, violations = 0;
  double rsum = 0.0;
  std::map<int, int> histogram;
  for (int t = 0; t < flags.trials; ++t) {
    const TrialOutcome& tr = results[t];
    out << "trial " << std::setw(2) << std::setfill('0') << t << std::setfill(' ')
        << ": " << to_string(tr.outcome);
    if (tr.outcome == RecoveryOutcome::Recovered) {
      out << " r=" << tr.r << " (k=" << tr.k << ")";
      ++successes;
      rsum += tr.r;
      ++histogram[tr.r];
      if (tr.r > flags.m) ++violations;
    }
    out << "\n";
  }
  out << "success " << successes << "/" << flags.trials << " ("
      << (100 * successes) / flags.trials << "%)\n";
  out << "r histogram:";
  for (const auto& [r, c] : histogram) out << " r=" << r << ":" << c;
  out << "\n";
  if (successes > 0)
    out << "mean r " << std::fixed << std::setprecision(2) << rsum / successes << "\n";
  out << "r<=m violations: " << violations << " (m=" << flags.m << ")\n";
  return violations > 0 ? 4 : 0;
}

int cmd_dump(const std::string& problem_path, int order, std::ostream& out,
             std::ostream& err) {
  ProblemFile p;
  try {
    p = load_problem(problem_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    MrpProblem prob{p.K, p.functionals};
    const int d1 = prob.base_degree();
    LmiProgram prog;
    if (p.kind == "trp-general") {
      GenericObjective R1 = generic_objective(p.n, d1, p.options.seed);
      GenericObjective R2 =
          generic_objective(p.n, d1, p.options.seed ^ 0x9e3779b97f4a7c15ULL);
      prog = assemble_pair(prob, R1.R, R2.R, order);
    } else {
      GenericObjective R = generic_objective(p.n, d1, p.options.seed);
      prog = assemble_mrp(prob, R.R, order);
    }
    dump_program(prog, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace momrec::cli
