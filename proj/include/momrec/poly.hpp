#pragma once

#include <Eigen/Core>
#include <map>
#include <memory>

#include "momrec/basis.hpp"

namespace momrec {

// Sparse multivariate polynomial with real coefficients.  Zero coefficients
// are never stored; |c| < 1e-14 is dropped after arithmetic so term maps stay
// canonical.
class Poly {
 public:
  explicit Poly(int n) : n_(n) {}

  static Poly constant(int n, double c);
  static Poly variable(int n, int i);
  static Poly monomial(int n, Exponent alpha, double c = 1.0);

  int vars() const { return n_; }
  int degree() const;                   // 0 for the zero polynomial
  bool is_zero() const { return terms_.empty(); }
  bool homogeneous() const;             // all terms share one degree
  double coeff(const Exponent& alpha) const;
  const std::map<Exponent, double>& terms() const { return terms_; }

  void add_term(const Exponent& alpha, double c);

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator-() const;
  Poly operator*(const Poly& o) const;
  Poly operator*(double t) const;

  double eval(const Eigen::VectorXd& u) const;

 private:
  int n_;
  std::map<Exponent, double> terms_;
};

// Truncated multi-sequence y = (y_alpha), |alpha| <= d, stored densely over
// MonomialBasis(n, d).
struct Tms {
  int n, d;
  Eigen::VectorXd values;

  Tms(int n_, int d_);
  Tms(int n_, int d_, Eigen::VectorXd v);

  const MonomialBasis& basis() const { return *basis_; }
  double at(const Exponent& alpha) const { return values[basis_->index(alpha)]; }
  double operator[](int i) const { return values[i]; }

  Tms truncated(int d2) const;  // restriction y|_{d2}, d2 <= d

 private:
  std::shared_ptr<const MonomialBasis> basis_;
};

// <p, y> = sum_alpha p_alpha y_alpha; requires deg(p) <= y.d.
double pair(const Poly& p, const Tms& y);

// [u]_d: entry at alpha is u^alpha.
Tms moment_vector(const Eigen::VectorXd& u, int d);

}  // namespace momrec
