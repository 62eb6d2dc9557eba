#pragma once

#include <Eigen/Core>
#include <vector>

#include "momrec/poly.hpp"

namespace momrec {

// Constraining set K = { x : c_i(x) = 0 (equalities), c_j(x) >= 0
// (inequalities) }, with an optional distinguished unit-sphere equality
// ||x||^2 = 1.  The sphere is a flag rather than a generic equality so that
// tensor recovery can require it structurally and extraction can renormalize
// atoms.
struct SemialgebraicSet {
  int n = 0;
  std::vector<Poly> equalities;
  std::vector<Poly> inequalities;
  bool sphere = false;

  // max over all constraints (sphere included) of max{1, ceil(deg/2)}.
  int constraint_degree() const;

  // max( max_i |c_i(u)|, max_j max(0, -c_j(u)), sphere ? | ||u||^2 - 1 | : 0 );
  // zero exactly on K.
  double membership_residual(const Eigen::VectorXd& u) const;

  // True iff every constraint polynomial has all terms of equal degree.
  bool homogeneous_constraints() const;

  Poly sphere_poly() const;  // ||x||^2 - 1

  static SemialgebraicSet unit_sphere(int n);
  // K for completely positive decompositions: x >= 0 componentwise on the
  // unit sphere.
  static SemialgebraicSet nonneg_sphere(int n);
};

}  // namespace momrec
