#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "momrec/relax.hpp"

namespace momrec {

// Order-d symmetric tensor on R^n, stored canonically: one value per
// exponent alpha with |alpha| = d (the entry at any index permutation with
// that content).  Storage length is binom(n+d-1, d).
struct SymTensor {
  int n = 0, d = 0;
  Eigen::VectorXd vals;

  SymTensor(int n_, int d_);

  int size() const { return static_cast<int>(vals.size()); }
  double at(const Exponent& alpha) const;
  void set(const Exponent& alpha, double v);
  void add(const Exponent& alpha, double v);

  // Number of full-tensor positions sharing the canonical entry:
  // d! / (alpha_1! ... alpha_n!).
  static std::int64_t mult(const Exponent& alpha);

  // Position of alpha (|alpha| = d) within the canonical storage.
  static int hom_index(int n, int d, const Exponent& alpha);
  static const Exponent& hom_exponent(int n, int d, int i);
};

// Exponent content of a subscript tuple (i_1, ..., i_d), 1-based entries.
Exponent exponent_from_subscripts(int n, const std::vector<int>& subs);

// Homogeneous truncated multi-sequence of degree d; the moment-side
// identification of a symmetric tensor (same canonical indexing).
struct Htms {
  int n = 0, d = 0;
  Eigen::VectorXd vals;
};

Htms tensor_to_htms(const SymTensor& A);
SymTensor htms_to_tensor(const Htms& h);

// f(x) = <F, x^(x)d>: coefficient of x^alpha is mult(alpha) * F_alpha, so
// that pair(f, tensor_to_htms(A)) equals the Hilbert-Schmidt inner product
// <F, A> for every symmetric A.
Poly measurement_poly(const SymTensor& F);

double hs_inner(const SymTensor& A, const SymTensor& B);

// Entrywise linear equation sum_t kappa_t * A_(sigma_t) = rhs, stored by
// exponent content.  Compiles to the literal functional f = sum kappa_t
// x^{alpha_t} (entry combinations constrain the named entries themselves).
struct TensorEquation {
  std::vector<std::pair<Exponent, double>> terms;
  double rhs = 0.0;
};

std::vector<std::pair<Poly, double>> equations_to_functionals(
    int n, int d, const std::vector<TensorEquation>& eqs);
std::vector<std::pair<Poly, double>> equations_to_functionals(
    const std::vector<std::pair<SymTensor, double>>& measurements);

// Signed rank-one decomposition sum_i sign_i * lambda_i * u_i^(x)d.
struct DecompTerm {
  int sign = 1;  // +1 or -1
  double weight = 0.0;
  Eigen::VectorXd atom;
};

struct Decomposition {
  int n = 0, d = 0;
  std::vector<DecompTerm> terms;
  int r() const { return static_cast<int>(terms.size()); }
  int r1() const;  // number of positive terms
};

SymTensor reconstruct(const Decomposition& dec);

// max_i |<f_i, h(A)> - b_i| for the tensor reconstructed from dec; the
// functionals must be homogeneous of degree dec.d.
double residual(const Decomposition& dec,
                const std::vector<std::pair<Poly, double>>& functionals);

struct TensorRecovery {
  HierarchyReport report;
  std::optional<Decomposition> dec;
  double residual = 0.0;
};

// Positive decomposition with atoms in a sphere-flagged K (homogeneous
// constraints required).
TensorRecovery recover_positive(const SemialgebraicSet& K,
                                const std::vector<std::pair<Poly, double>>& functionals,
                                int d, const HierarchyOptions& opt);

// Signed decomposition: atoms of the first measure enter with +, the second
// with -.
TensorRecovery recover_general(const SemialgebraicSet& K,
                               const std::vector<std::pair<Poly, double>>& functionals,
                               int d, const HierarchyOptions& opt);

}  // namespace momrec
