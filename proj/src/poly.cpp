#include "momrec/poly.hpp"

#include <cmath>
#include <stdexcept>

namespace momrec {

namespace {
constexpr double kCoeffFloor = 1e-14;
}

Poly Poly::constant(int n, double c) {
  Poly p(n);
  p.add_term(Exponent(n, 0), c);
  return p;
}

Poly Poly::variable(int n, int i) {
  if (i < 0 || i >= n) throw std::invalid_argument("Poly::variable: index out of range");
  Exponent a(n, 0);
  a[i] = 1;
  return monomial(n, a);
}

Poly Poly::monomial(int n, Exponent alpha, double c) {
  if (static_cast<int>(alpha.size()) != n)
    throw std::invalid_argument("Poly::monomial: dimension mismatch");
  Poly p(n);
  p.add_term(alpha, c);
  return p;
}

int Poly::degree() const {
  int d = 0;
  for (const auto& [a, c] : terms_) d = std::max(d, total_degree(a));
  return d;
}

bool Poly::homogeneous() const {
  if (terms_.empty()) return true;
  int d = total_degree(terms_.begin()->first);
  for (const auto& [a, c] : terms_)
    if (total_degree(a) != d) return false;
  return true;
}

double Poly::coeff(const Exponent& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? 0.0 : it->second;
}

void Poly::add_term(const Exponent& alpha, double c) {
  if (static_cast<int>(alpha.size()) != n_)
    throw std::invalid_argument("Poly::add_term: dimension mismatch");
  for (int v : alpha)
    if (v < 0) throw std::invalid_argument("Poly::add_term: negative power");
  auto it = terms_.find(alpha);
  double v = (it == terms_.end() ? 0.0 : it->second) + c;
  if (std::abs(v) < kCoeffFloor) {
    if (it != terms_.end()) terms_.erase(it);
  } else if (it == terms_.end()) {
    terms_.emplace(alpha, v);
  } else {
    it->second = v;
  }
}

Poly Poly::operator+(const Poly& o) const {
  if (n_ != o.n_) throw std::invalid_argument("Poly: dimension mismatch");
  Poly r = *this;
  for (const auto& [a, c] : o.terms_) r.add_term(a, c);
  return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator-() const {
  Poly r(n_);
  for (const auto& [a, c] : terms_) r.terms_.emplace(a, -c);
  return r;
}

Poly Poly::operator*(const Poly& o) const {
  if (n_ != o.n_) throw std::invalid_argument("Poly: dimension mismatch");
  Poly r(n_);
  for (const auto& [a, ca] : terms_)
    for (const auto& [b, cb] : o.terms_) r.add_term(add_exponents(a, b), ca * cb);
  return r;
}

Poly Poly::operator*(double t) const {
  Poly r(n_);
  for (const auto& [a, c] : terms_)
    if (std::abs(c * t) >= kCoeffFloor) r.terms_.emplace(a, c * t);
  return r;
}

double Poly::eval(const Eigen::VectorXd& u) const {
  if (u.size() != n_) throw std::invalid_argument("Poly::eval: dimension mismatch");
  double s = 0.0;
  for (const auto& [a, c] : terms_) {
    double m = c;
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < a[i]; ++k) m *= u[i];
    s += m;
  }
  return s;
}

Tms::Tms(int n_in, int d_in) : n(n_in), d(d_in), basis_(MonomialBasis::get(n_in, d_in)) {
  values = Eigen::VectorXd::Zero(basis_->size());
}

Tms::Tms(int n_in, int d_in, Eigen::VectorXd v)
    : n(n_in), d(d_in), values(std::move(v)), basis_(MonomialBasis::get(n_in, d_in)) {
  if (values.size() != basis_->size())
    throw std::invalid_argument("Tms: value vector has wrong length");
}

Tms Tms::truncated(int d2) const {
  if (d2 > d) throw std::invalid_argument("Tms::truncated: degree exceeds stored degree");
  // Graded ordering makes the degree-d2 block a prefix.
  int len = static_cast<int>(binom(n + d2, d2));
  return Tms(n, d2, values.head(len));
}

double pair(const Poly& p, const Tms& y) {
  if (p.vars() != y.n) throw std::invalid_argument("pair: dimension mismatch");
  if (p.degree() > y.d) throw std::invalid_argument("pair: polynomial degree exceeds tms degree");
  double s = 0.0;
  for (const auto& [a, c] : p.terms()) s += c * y.at(a);
  return s;
}

Tms moment_vector(const Eigen::VectorXd& u, int d) {
  int n = static_cast<int>(u.size());
  Tms y(n, d);
  const MonomialBasis& basis = y.basis();
  for (int i = 0; i < basis.size(); ++i) {
    const Exponent& a = basis.monomial(i);
    double m = 1.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < a[j]; ++k) m *= u[j];
    y.values[i] = m;
  }
  return y;
}

}  // namespace momrec
