#pragma once

#include <Eigen/Core>
#include <memory>
#include <utility>
#include <vector>

#include "momrec/poly.hpp"

namespace momrec {

// Sparse linear functional over moment indices of MonomialBasis(n, 2k).
struct SparseForm {
  std::vector<std::pair<int, double>> terms;
};

// Precomputed linear map y -> L_q^{(k)}[y].  Entry (r, c) of the matrix is
// sum_alpha q_alpha * y_{alpha + beta_r + beta_c}, which depends on (r, c)
// only through the shift s = beta_r + beta_c; forms are stored once per
// distinct shift.  For q = 1 this is the moment matrix map y -> M_k[y].
class LocalizingStencil {
 public:
  LocalizingStencil(const Poly& q, int k);

  int vars() const { return n_; }
  int order() const { return k_; }
  int rows() const { return static_cast<int>(row_basis_->size()); }
  int moment_degree() const { return 2 * k_; }       // degree of the argument y
  int shift_degree() const { return shift_degree_; } // 2 * (k - ceil(deg q / 2))
  const Poly& poly() const { return q_; }

  const MonomialBasis& row_monomials() const { return *row_basis_; }
  int num_shifts() const { return static_cast<int>(shift_forms_.size()); }
  const SparseForm& shift_form(int s) const { return shift_forms_[s]; }
  // shift index for entry (r, c); any (r, c) with the same monomial sum maps
  // to the same form.
  int shift_index(int r, int c) const;
  const SparseForm& entry_form(int r, int c) const { return shift_forms_[shift_index(r, c)]; }

  // Dense L_q^{(k)}[y]; y indexed by MonomialBasis(n, 2k).
  Eigen::MatrixXd apply(const Eigen::VectorXd& y) const;

 private:
  int n_, k_, shift_degree_;
  Poly q_;
  std::shared_ptr<const MonomialBasis> row_basis_;
  std::vector<SparseForm> shift_forms_;
  std::vector<int> entry_shift_;  // packed lower triangle (r >= c)
};

// Shared stencil cache keyed by (q, k); safe for concurrent reads with
// exclusive insertion.
std::shared_ptr<const LocalizingStencil> stencil(const Poly& q, int k);

// M_k[y]; requires y.d >= 2k.
Eigen::MatrixXd moment_matrix(const Tms& y, int k);

// L_q^{(k)}[y]; requires y.d >= 2k and deg(q) <= 2k.
Eigen::MatrixXd localizing_matrix(const Poly& q, const Tms& y, int k);

}  // namespace momrec
