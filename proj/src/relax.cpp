#include "momrec/relax.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "momrec/momentlin.hpp"
#include "momrec/rng.hpp"

namespace momrec {

const char* to_string(RecoveryOutcome o) {
  switch (o) {
    case RecoveryOutcome::Recovered: return "recovered";
    case RecoveryOutcome::NoFlatTruncation: return "no-flat-truncation";
    case RecoveryOutcome::Infeasible: return "infeasible";
    case RecoveryOutcome::SolverFailure: return "solver-failure";
  }
  return "?";
}

int MrpProblem::data_degree() const {
  int d = 0;
  for (const auto& [a, b] : functionals) d = std::max(d, a.degree());
  return d;
}

int MrpProblem::base_degree() const {
  int d = data_degree();
  return 2 * ((d + 1) / 2);
}

Eigen::VectorXd MrpProblem::rhs() const {
  Eigen::VectorXd b(functionals.size());
  for (std::size_t i = 0; i < functionals.size(); ++i) b[i] = functionals[i].second;
  return b;
}

GenericObjective generic_objective(int n, int d1, std::uint64_t seed) {
  if (d1 % 2 != 0) throw std::invalid_argument("generic_objective: d1 must be even");
  auto half = MonomialBasis::get(n, d1 / 2);
  const int nb = half->size();
  Rng rng = Rng::derive(seed, 0x6f626a); // objective stream
  GenericObjective out;
  out.seed = seed;
  for (int attempt = 0; attempt < 64; ++attempt) {
    Eigen::MatrixXd G(nb, nb);
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j) G(i, j) = rng.normal();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(G);
    if (svd.singularValues().minCoeff() > 1e-8) {
      out.G = std::move(G);
      break;
    }
  }
  Eigen::MatrixXd gram = out.G.transpose() * out.G;
  Poly R(n);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j)
      R.add_term(add_exponents(half->monomial(i), half->monomial(j)), gram(i, j));
  out.R = std::move(R);
  return out;
}

GenericObjective identity_objective(int n, int d1) {
  if (d1 % 2 != 0) throw std::invalid_argument("identity_objective: d1 must be even");
  auto half = MonomialBasis::get(n, d1 / 2);
  GenericObjective out;
  out.G = Eigen::MatrixXd::Identity(half->size(), half->size());
  Poly R(n);
  for (int i = 0; i < half->size(); ++i)
    R.add_term(add_exponents(half->monomial(i), half->monomial(i)), 1.0);
  out.R = std::move(R);
  return out;
}

namespace {

void scatter_poly(const Poly& p, const MonomialBasis& basis, Eigen::Ref<Eigen::VectorXd> row) {
  for (const auto& [a, c] : p.terms()) row[basis.index(a)] += c;
}

// One equality row per distinct shift monomial of the localizing map; the
// matrix condition L_q^{(k)}[y] = 0 entrywise collapses to these rows.
void append_localizing_rows(const Poly& q, int k, int alpha_offset,
                            std::vector<Eigen::VectorXd>& rows,
                            std::vector<double>& rhs, int total_vars) {
  auto st = stencil(q, k);
  for (int s = 0; s < st->num_shifts(); ++s) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(total_vars);
    for (const auto& [idx, coef] : st->shift_form(s).terms) row[alpha_offset + idx] += coef;
    rows.push_back(std::move(row));
    rhs.push_back(0.0);
  }
}

LmiBlock block_from_stencil(const Poly& q, int k, int alpha_offset) {
  auto st = stencil(q, k);
  LmiBlock b;
  b.size = st->rows();
  for (int r = 0; r < b.size; ++r)
    for (int c = 0; c <= r; ++c)
      for (const auto& [idx, coef] : st->entry_form(r, c).terms)
        b.entries.push_back({r, c, alpha_offset + idx, coef});
  return b;
}

void check_orders(const MrpProblem& prob, int k) {
  if (2 * k < prob.base_degree())
    throw std::invalid_argument("relaxation order too small for the functional degrees");
  if (k < prob.K.constraint_degree())
    throw std::invalid_argument("relaxation order below the constraint degree");
}

LmiProgram finish_program(std::vector<Eigen::VectorXd>& rows, std::vector<double>& rhs,
                          Eigen::VectorXd c, std::vector<LmiBlock> blocks,
                          int total_vars, int functional_rows) {
  LmiProgram prog;
  prog.num_vars = total_vars;
  prog.c = std::move(c);
  prog.F.resize(rows.size(), total_vars);
  prog.g.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    prog.F.row(i) = rows[i];
    prog.g[i] = rhs[i];
  }
  prog.blocks = std::move(blocks);
  prog.num_functional_rows = functional_rows;
  return prog;
}

}  // namespace

LmiProgram assemble_mrp(const MrpProblem& prob, const Poly& R, int k) {
  check_orders(prob, k);
  const int n = prob.K.n;
  auto basis = MonomialBasis::get(n, 2 * k);
  const int N = basis->size();

  Eigen::VectorXd c = Eigen::VectorXd::Zero(N);
  scatter_poly(R, *basis, c);

  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  for (const auto& [a, b] : prob.functionals) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(N);
    scatter_poly(a, *basis, row);
    rows.push_back(std::move(row));
    rhs.push_back(b);
  }
  const int m = static_cast<int>(rows.size());
  for (const auto& ci : prob.K.equalities) append_localizing_rows(ci, k, 0, rows, rhs, N);
  if (prob.K.sphere) append_localizing_rows(prob.K.sphere_poly(), k, 0, rows, rhs, N);

  std::vector<LmiBlock> blocks;
  blocks.push_back(block_from_stencil(Poly::constant(n, 1.0), k, 0));
  for (const auto& cj : prob.K.inequalities) blocks.push_back(block_from_stencil(cj, k, 0));

  return finish_program(rows, rhs, std::move(c), std::move(blocks), N, m);
}

LmiProgram assemble_pair(const MrpProblem& prob, const Poly& R1, const Poly& R2, int k) {
  check_orders(prob, k);
  if (!prob.K.sphere)
    throw std::invalid_argument("signed recovery requires the unit-sphere flag on K");
  if (!prob.K.homogeneous_constraints())
    throw std::invalid_argument("signed recovery requires homogeneous constraints");
  const int n = prob.K.n;
  auto basis = MonomialBasis::get(n, 2 * k);
  const int N = basis->size();

  Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * N);
  scatter_poly(R1, *basis, c.head(N));
  scatter_poly(R2, *basis, c.tail(N));

  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  for (const auto& [f, b] : prob.functionals) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(2 * N);
    scatter_poly(f, *basis, row.head(N));
    row.tail(N) = -row.head(N);
    rows.push_back(std::move(row));
    rhs.push_back(b);
  }
  const int m = static_cast<int>(rows.size());
  for (int off : {0, N}) {
    for (const auto& ci : prob.K.equalities)
      append_localizing_rows(ci, k, off, rows, rhs, 2 * N);
    append_localizing_rows(prob.K.sphere_poly(), k, off, rows, rhs, 2 * N);
  }

  std::vector<LmiBlock> blocks;
  for (int off : {0, N}) {
    blocks.push_back(block_from_stencil(Poly::constant(n, 1.0), k, off));
    for (const auto& cj : prob.K.inequalities) blocks.push_back(block_from_stencil(cj, k, off));
  }
  return finish_program(rows, rhs, std::move(c), std::move(blocks), 2 * N, m);
}

namespace {

struct OrderSetup {
  int k_min, k_max, t_min, dK;
  double bscale;
};

OrderSetup order_setup(const MrpProblem& prob, const HierarchyOptions& opt) {
  OrderSetup s;
  const int d1 = prob.base_degree();
  s.dK = prob.K.constraint_degree();
  s.t_min = std::max(s.dK, (d1 + 1) / 2);
  s.k_min = opt.k_min > 0 ? opt.k_min : std::max((d1 + 1) / 2, s.dK);
  s.k_max = opt.k_max > 0 ? opt.k_max : s.k_min + 3;
  Eigen::VectorXd b = prob.rhs();
  s.bscale = 1.0 + (b.size() > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
  return s;
}

// A near-optimal iterate is still useful for the rank scan; hard failures
// are recorded and the next order attempted.
bool usable_solution(const SdpSolution& sol) {
  if (sol.status == SdpStatus::Optimal) return true;
  if (sol.status == SdpStatus::MaxIter || sol.status == SdpStatus::NumericalTrouble)
    return sol.rel_gap <= 1e-5 && sol.lmi_min_eig >= -1e-6;
  return false;
}

ExtractOptions extract_options(const HierarchyOptions& opt) {
  ExtractOptions e;
  e.rank_tol = opt.tol.rank_tol;
  e.merge_tol = opt.tol.merge_tol;
  e.weight_floor = opt.tol.weight_floor;
  e.reconstruction_tol = opt.tol.reconstruction_tol;
  e.atom_tol = opt.tol.atom_tol;
  e.seed = opt.seed;
  return e;
}

}  // namespace

MrpResult run_hierarchy(const MrpProblem& prob, const HierarchyOptions& opt) {
  MrpResult res;
  const OrderSetup s = order_setup(prob, opt);
  GenericObjective obj = generic_objective(prob.K.n, prob.base_degree(), opt.seed);
  bool solver_failed = false;

  for (int k = s.k_min; k <= s.k_max; ++k) {
    LmiProgram prog = assemble_mrp(prob, obj.R, k);
    SdpSolution sol = solve(prog, opt.sdp);

    OrderRecord rec;
    rec.k = k;
    rec.status = sol.status;
    rec.phi = sol.primal_obj;
    rec.lambda = sol.eq_duals.head(prog.num_functional_rows);
    rec.note = sol.message;

    if (sol.status == SdpStatus::Infeasible) {
      res.report.orders.push_back(std::move(rec));
      res.report.outcome = RecoveryOutcome::Infeasible;
      return res;
    }
    if (!usable_solution(sol)) {
      solver_failed = true;
      res.report.orders.push_back(std::move(rec));
      continue;
    }

    Tms w(prob.K.n, 2 * k, sol.y);
    if (w[0] <= opt.tol.zero_tol * s.bscale) {
      rec.zero_branch = true;
      rec.flat_t = s.t_min;
      res.report.orders.push_back(std::move(rec));
      res.report.outcome = RecoveryOutcome::Recovered;
      res.measure = AtomicMeasure{};
      return res;
    }

    auto t = flat_degrees(w, k, s.dK, opt.tol.rank_tol, s.t_min);
    if (t) {
      rec.flat_t = *t;
      rec.rank_t = numeric_rank(moment_matrix(w, *t), opt.tol.rank_tol);
      rec.rank_low = numeric_rank(moment_matrix(w, *t - s.dK), opt.tol.rank_tol);
      auto measure = extract_atoms(w.truncated(2 * *t), rec.rank_t, prob.K,
                                   extract_options(opt));
      if (measure) {
        res.report.orders.push_back(std::move(rec));
        res.report.outcome = RecoveryOutcome::Recovered;
        res.measure = std::move(measure);
        return res;
      }
      rec.note += (rec.note.empty() ? "" : "; ") + std::string("extraction failed");
      rec.flat_t.reset();
    }
    res.report.orders.push_back(std::move(rec));
  }
  res.report.outcome = solver_failed ? RecoveryOutcome::SolverFailure
                                     : RecoveryOutcome::NoFlatTruncation;
  return res;
}

PairResult run_hierarchy_pair(const MrpProblem& prob, const HierarchyOptions& opt) {
  PairResult res;
  const OrderSetup s = order_setup(prob, opt);
  GenericObjective obj1 = generic_objective(prob.K.n, prob.base_degree(), opt.seed);
  GenericObjective obj2 =
      generic_objective(prob.K.n, prob.base_degree(), opt.seed ^ 0x9e3779b97f4a7c15ULL);
  bool solver_failed = false;

  for (int k = s.k_min; k <= s.k_max; ++k) {
    LmiProgram prog = assemble_pair(prob, obj1.R, obj2.R, k);
    SdpSolution sol = solve(prog, opt.sdp);
    const int N = static_cast<int>(binom(prob.K.n + 2 * k, 2 * k));

    OrderRecord rec;
    rec.k = k;
    rec.status = sol.status;
    rec.phi = sol.primal_obj;
    rec.lambda = sol.eq_duals.head(prog.num_functional_rows);
    rec.note = sol.message;

    if (sol.status == SdpStatus::Infeasible) {
      res.report.orders.push_back(std::move(rec));
      res.report.outcome = RecoveryOutcome::Infeasible;
      return res;
    }
    if (!usable_solution(sol)) {
      solver_failed = true;
      res.report.orders.push_back(std::move(rec));
      continue;
    }

    Tms w(prob.K.n, 2 * k, sol.y.head(N));
    Tms v(prob.K.n, 2 * k, sol.y.tail(N));
    const bool w_zero = w[0] <= opt.tol.zero_tol * s.bscale;
    const bool v_zero = v[0] <= opt.tol.zero_tol * s.bscale;
    rec.zero_branch = w_zero && v_zero;

    // Common flat degree across the components that are not identically zero.
    std::optional<int> common;
    for (int t = s.t_min; t <= k && !common; ++t) {
      bool ok = true;
      if (!w_zero) {
        ok = numeric_rank(moment_matrix(w, t - s.dK), opt.tol.rank_tol) ==
             numeric_rank(moment_matrix(w, t), opt.tol.rank_tol);
      }
      if (ok && !v_zero) {
        ok = numeric_rank(moment_matrix(v, t - s.dK), opt.tol.rank_tol) ==
             numeric_rank(moment_matrix(v, t), opt.tol.rank_tol);
      }
      if (ok) common = t;
    }
    if (common || (w_zero && v_zero)) {
      int t = common.value_or(s.t_min);
      rec.flat_t = t;
      std::optional<AtomicMeasure> mw = AtomicMeasure{}, mv = AtomicMeasure{};
      if (!w_zero) {
        rec.rank_t = numeric_rank(moment_matrix(w, t), opt.tol.rank_tol);
        mw = extract_atoms(w.truncated(2 * t), rec.rank_t, prob.K, extract_options(opt));
      }
      if (!v_zero) {
        int rv = numeric_rank(moment_matrix(v, t), opt.tol.rank_tol);
        mv = extract_atoms(v.truncated(2 * t), rv, prob.K, extract_options(opt));
      }
      if (mw && mv) {
        res.report.orders.push_back(std::move(rec));
        res.report.outcome = RecoveryOutcome::Recovered;
        res.plus = std::move(mw);
        res.minus = std::move(mv);
        return res;
      }
      rec.note += (rec.note.empty() ? "" : "; ") + std::string("extraction failed");
      rec.flat_t.reset();
    }
    res.report.orders.push_back(std::move(rec));
  }
  res.report.outcome = solver_failed ? RecoveryOutcome::SolverFailure
                                     : RecoveryOutcome::NoFlatTruncation;
  return res;
}

}  // namespace momrec
