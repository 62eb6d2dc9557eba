#include "momrec/tensorrec.hpp"

#include <cmath>
#include <stdexcept>

namespace momrec {

namespace {

int hom_offset(int n, int d) {
  // Degree-d monomials are the tail block of MonomialBasis(n, d).
  return static_cast<int>(binom(n + d - 1, d - 1));
}

}  // namespace

SymTensor::SymTensor(int n_, int d_) : n(n_), d(d_) {
  if (n < 1 || d < 1) throw std::invalid_argument("SymTensor: need n, d >= 1");
  vals = Eigen::VectorXd::Zero(binom(n + d - 1, d));
}

int SymTensor::hom_index(int n, int d, const Exponent& alpha) {
  if (total_degree(alpha) != d)
    throw std::invalid_argument("SymTensor: exponent degree must equal d");
  return MonomialBasis::get(n, d)->index(alpha) - hom_offset(n, d);
}

const Exponent& SymTensor::hom_exponent(int n, int d, int i) {
  return MonomialBasis::get(n, d)->monomial(hom_offset(n, d) + i);
}

double SymTensor::at(const Exponent& alpha) const { return vals[hom_index(n, d, alpha)]; }
void SymTensor::set(const Exponent& alpha, double v) { vals[hom_index(n, d, alpha)] = v; }
void SymTensor::add(const Exponent& alpha, double v) { vals[hom_index(n, d, alpha)] += v; }

std::int64_t SymTensor::mult(const Exponent& alpha) {
  std::int64_t m = 1;
  int total = 0;
  for (int a : alpha)
    for (int j = 1; j <= a; ++j) m = m * (++total) / j;
  return m;
}

Exponent exponent_from_subscripts(int n, const std::vector<int>& subs) {
  Exponent a(n, 0);
  for (int s : subs) {
    if (s < 1 || s > n) throw std::invalid_argument("subscript out of range");
    ++a[s - 1];
  }
  return a;
}

Htms tensor_to_htms(const SymTensor& A) { return Htms{A.n, A.d, A.vals}; }

SymTensor htms_to_tensor(const Htms& h) {
  SymTensor A(h.n, h.d);
  if (h.vals.size() != A.vals.size()) throw std::invalid_argument("htms length mismatch");
  A.vals = h.vals;
  return A;
}

Poly measurement_poly(const SymTensor& F) {
  Poly f(F.n);
  for (int i = 0; i < F.size(); ++i) {
    if (F.vals[i] == 0.0) continue;
    const Exponent& a = SymTensor::hom_exponent(F.n, F.d, i);
    f.add_term(a, static_cast<double>(SymTensor::mult(a)) * F.vals[i]);
  }
  return f;
}

double hs_inner(const SymTensor& A, const SymTensor& B) {
  if (A.n != B.n || A.d != B.d) throw std::invalid_argument("hs_inner: shape mismatch");
  double s = 0.0;
  for (int i = 0; i < A.size(); ++i)
    s += static_cast<double>(SymTensor::mult(SymTensor::hom_exponent(A.n, A.d, i))) *
         A.vals[i] * B.vals[i];
  return s;
}

std::vector<std::pair<Poly, double>> equations_to_functionals(
    int n, int d, const std::vector<TensorEquation>& eqs) {
  std::vector<std::pair<Poly, double>> out;
  out.reserve(eqs.size());
  for (const auto& eq : eqs) {
    Poly f(n);
    for (const auto& [alpha, kappa] : eq.terms) {
      if (static_cast<int>(alpha.size()) != n || total_degree(alpha) != d)
        throw std::invalid_argument("equation term has wrong shape");
      f.add_term(alpha, kappa);
    }
    out.emplace_back(std::move(f), eq.rhs);
  }
  return out;
}

std::vector<std::pair<Poly, double>> equations_to_functionals(
    const std::vector<std::pair<SymTensor, double>>& measurements) {
  std::vector<std::pair<Poly, double>> out;
  out.reserve(measurements.size());
  for (const auto& [F, b] : measurements) out.emplace_back(measurement_poly(F), b);
  return out;
}

int Decomposition::r1() const {
  int c = 0;
  for (const auto& t : terms)
    if (t.sign > 0) ++c;
  return c;
}

SymTensor reconstruct(const Decomposition& dec) {
  SymTensor A(dec.n, dec.d);
  for (int i = 0; i < A.size(); ++i) {
    const Exponent& a = SymTensor::hom_exponent(dec.n, dec.d, i);
    double v = 0.0;
    for (const auto& t : dec.terms) {
      double m = 1.0;
      for (int j = 0; j < dec.n; ++j)
        for (int k = 0; k < a[j]; ++k) m *= t.atom[j];
      v += t.sign * t.weight * m;
    }
    A.vals[i] = v;
  }
  return A;
}

double residual(const Decomposition& dec,
                const std::vector<std::pair<Poly, double>>& functionals) {
  double worst = 0.0;
  for (const auto& [f, b] : functionals) {
    double v = 0.0;
    for (const auto& t : dec.terms) v += t.sign * t.weight * f.eval(t.atom);
    worst = std::max(worst, std::abs(v - b));
  }
  return worst;
}

namespace {

void check_tensor_set(const SemialgebraicSet& K,
                      const std::vector<std::pair<Poly, double>>& functionals, int d) {
  if (!K.sphere)
    throw std::invalid_argument("tensor recovery requires the unit-sphere flag on K");
  if (!K.homogeneous_constraints())
    throw std::invalid_argument("tensor recovery requires homogeneous constraints");
  for (const auto& [f, b] : functionals)
    if (!f.is_zero() && (!f.homogeneous() || f.degree() != d))
      throw std::invalid_argument("functionals must be homogeneous of degree d");
}

Decomposition measure_terms(int n, int d, const AtomicMeasure& m, int sign,
                            Decomposition dec = {}) {
  dec.n = n;
  dec.d = d;
  for (int i = 0; i < m.r(); ++i)
    dec.terms.push_back({sign, m.weights[i], m.atoms[i]});
  return dec;
}

}  // namespace

TensorRecovery recover_positive(const SemialgebraicSet& K,
                                const std::vector<std::pair<Poly, double>>& functionals,
                                int d, const HierarchyOptions& opt) {
  check_tensor_set(K, functionals, d);
  MrpProblem prob{K, functionals};
  MrpResult res = run_hierarchy(prob, opt);
  TensorRecovery out;
  out.report = std::move(res.report);
  if (out.report.outcome == RecoveryOutcome::Recovered && res.measure) {
    out.dec = measure_terms(K.n, d, *res.measure, +1);
    out.residual = residual(*out.dec, functionals);
  }
  return out;
}

TensorRecovery recover_general(const SemialgebraicSet& K,
                               const std::vector<std::pair<Poly, double>>& functionals,
                               int d, const HierarchyOptions& opt) {
  check_tensor_set(K, functionals, d);
  MrpProblem prob{K, functionals};
  PairResult res = run_hierarchy_pair(prob, opt);
  TensorRecovery out;
  out.report = std::move(res.report);
  if (out.report.outcome == RecoveryOutcome::Recovered && res.plus && res.minus) {
    Decomposition dec = measure_terms(K.n, d, *res.plus, +1);
    dec = measure_terms(K.n, d, *res.minus, -1, std::move(dec));
    out.dec = std::move(dec);
    out.residual = residual(*out.dec, functionals);
  }
  return out;
}

}  // namespace momrec
