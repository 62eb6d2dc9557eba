#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "momrec/extract.hpp"
#include "momrec/poly.hpp"
#include "momrec/sdp.hpp"
#include "momrec/semialg.hpp"

namespace momrec {

// Moment recovery data: find mu in B(K) with integral a_i d(mu) = b_i.
struct MrpProblem {
  SemialgebraicSet K;
  std::vector<std::pair<Poly, double>> functionals;  // (a_i, b_i)

  int data_degree() const;  // d = max deg a_i
  int base_degree() const;  // d1 = 2 ceil(d/2)
  Eigen::VectorXd rhs() const;
};

// R = [x]_{d1/2}^T G^T G [x]_{d1/2} for a seeded Gaussian square G,
// resampled until G is comfortably nonsingular.
struct GenericObjective {
  Poly R;
  Eigen::MatrixXd G;
  std::uint64_t seed = 0;
};

GenericObjective generic_objective(int n, int d1, std::uint64_t seed);
GenericObjective identity_objective(int n, int d1);  // G = I, test hook

// Order-k moment relaxation of the MRP: variable w of degree 2k, objective
// <R, w>, functional equalities, localizing equalities for the ideal part
// (and the sphere when flagged), PSD blocks M_k and one localizer per
// inequality.  Requires 2k >= d1 and k >= d_K.
LmiProgram assemble_mrp(const MrpProblem& prob, const Poly& R, int k);

// Two-measure relaxation over (w, v) for signed recovery:
// <f_i, w> - <f_i, v> = b_i, per-measure cones duplicated, objective
// <R1, w> + <R2, v>.  Requires a sphere-flagged K with homogeneous
// constraints.
LmiProgram assemble_pair(const MrpProblem& prob, const Poly& R1, const Poly& R2, int k);

struct Tolerances {
  double rank_tol = 1e-6;
  double zero_tol = 1e-7;  // zero-measure branch, scaled by 1 + ||b||_inf
  double atom_tol = 1e-5;
  double merge_tol = 1e-6;
  double weight_floor = 1e-8;
  double reconstruction_tol = 1e-5;
};

struct HierarchyOptions {
  std::uint64_t seed = 1;
  int k_min = 0;  // 0: max(ceil(d1/2), d_K)
  int k_max = 0;  // 0: k_min + 3
  Tolerances tol;
  SdpOptions sdp = tight_sdp_defaults();

  static SdpOptions tight_sdp_defaults() {
    SdpOptions o;
    o.feas_tol = 1e-9;
    o.gap_tol = 1e-9;
    return o;
  }
};

struct OrderRecord {
  int k = 0;
  SdpStatus status = SdpStatus::NumericalTrouble;
  double phi = 0.0;
  Eigen::VectorXd lambda;       // functional-row duals
  bool zero_branch = false;     // zeroth moment vanished; zero measure taken
  std::optional<int> flat_t;
  int rank_t = -1, rank_low = -1;
  std::string note;
};

enum class RecoveryOutcome { Recovered, NoFlatTruncation, Infeasible, SolverFailure };
const char* to_string(RecoveryOutcome o);

struct HierarchyReport {
  RecoveryOutcome outcome = RecoveryOutcome::NoFlatTruncation;
  std::vector<OrderRecord> orders;
};

struct MrpResult {
  HierarchyReport report;
  std::optional<AtomicMeasure> measure;
};

struct PairResult {
  HierarchyReport report;
  std::optional<AtomicMeasure> plus, minus;  // atoms of w and of v
};

// Solves orders k_min..k_max until a flat truncation is found and atoms are
// extracted.  A minimizer with vanishing zeroth moment short-circuits to the
// zero measure.
MrpResult run_hierarchy(const MrpProblem& prob, const HierarchyOptions& opt);

// Signed variant; both components must be flat at a common degree t, with a
// vanishing zeroth moment exempting its component.
PairResult run_hierarchy_pair(const MrpProblem& prob, const HierarchyOptions& opt);

}  // namespace momrec
