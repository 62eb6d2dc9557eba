#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "momrec/poly.hpp"
#include "momrec/semialg.hpp"

namespace momrec {

// Finitely atomic measure sum_i lambda_i delta_{u_i}.  r = 0 encodes the
// zero measure.
struct AtomicMeasure {
  std::vector<Eigen::VectorXd> atoms;
  std::vector<double> weights;
  std::vector<double> membership;     // residual of each atom against K
  double reconstruction_error = 0.0;  // moment mismatch, relative
  bool degraded = false;              // an atom exceeded atom_tol against K
  int r() const { return static_cast<int>(atoms.size()); }
};

// Count of singular values above tau * max(sigma_1, 1).
int numeric_rank(const Eigen::MatrixXd& M, double tau);

// Smallest t in [max(t_min, dK), k] with rank M_{t-dK}[w] == rank M_t[w].
std::optional<int> flat_degrees(const Tms& w, int k, int dK, double tau, int t_min);

struct ExtractOptions {
  double rank_tol = 1e-6;       // shared by both ranks of the flatness test
  double merge_tol = 1e-6;      // coincident atoms merged, weights summed
  double weight_floor = 1e-8;
  double neg_weight_tol = 1e-6;
  double reconstruction_tol = 1e-6;
  double atom_tol = 1e-5;
  int max_resample = 5;
  std::uint64_t seed = 0;
};

// Atom/weight extraction from a flat moment vector of degree 2t with
// rank M_t = r, by the multiplication-matrix method:
// factor M_t = V V^T, select a monomial row basis by pivoted orthogonal
// reduction, solve the shifted-row systems for the multiplication matrices
// N_i, read atom coordinates from the ordered Schur vectors of a random
// combination sum xi_i N_i, and fit weights by least squares.
// Returns nullopt on basis-selection failure, negative weights beyond
// tolerance, or irreducible reconstruction error.
std::optional<AtomicMeasure> extract_atoms(const Tms& w2t, int r,
                                           const SemialgebraicSet& K,
                                           const ExtractOptions& opt);

}  // namespace momrec
