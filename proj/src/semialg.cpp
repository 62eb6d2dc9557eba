#include "momrec/semialg.hpp"

#include <cmath>
#include <stdexcept>

namespace momrec {

int SemialgebraicSet::constraint_degree() const {
  int dk = 1;
  auto bump = [&dk](const Poly& c) {
    dk = std::max(dk, (c.degree() + 1) / 2);
  };
  for (const auto& c : equalities) bump(c);
  for (const auto& c : inequalities) bump(c);
  if (sphere) dk = std::max(dk, 1);
  return dk;
}

double SemialgebraicSet::membership_residual(const Eigen::VectorXd& u) const {
  if (u.size() != n)
    throw std::invalid_argument("membership_residual: dimension mismatch");
  double r = 0.0;
  for (const auto& c : equalities) r = std::max(r, std::abs(c.eval(u)));
  for (const auto& c : inequalities) r = std::max(r, std::max(0.0, -c.eval(u)));
  if (sphere) r = std::max(r, std::abs(u.squaredNorm() - 1.0));
  return r;
}

bool SemialgebraicSet::homogeneous_constraints() const {
  for (const auto& c : equalities)
    if (!c.homogeneous()) return false;
  for (const auto& c : inequalities)
    if (!c.homogeneous()) return false;
  return true;
}

Poly SemialgebraicSet::sphere_poly() const {
  Poly p = Poly::constant(n, -1.0);
  for (int i = 0; i < n; ++i) {
    Exponent a(n, 0);
    a[i] = 2;
    p.add_term(a, 1.0);
  }
  return p;
}

SemialgebraicSet SemialgebraicSet::unit_sphere(int n) {
  SemialgebraicSet K;
  K.n = n;
  K.sphere = true;
  return K;
}

SemialgebraicSet SemialgebraicSet::nonneg_sphere(int n) {
  SemialgebraicSet K = unit_sphere(n);
  for (int i = 0; i < n; ++i) K.inequalities.push_back(Poly::variable(n, i));
  return K;
}

}  // namespace momrec
