#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

namespace momrec {

// One PSD block of a homogeneous LMI: sum_alpha y_alpha A_alpha >= 0.
// Coefficient matrices are stored as sparse (row, col, alpha, coeff)
// quadruples over the lower triangle (row >= col); symmetry is implied.
struct LmiBlock {
  struct Entry {
    int row, col, alpha;
    double coeff;
  };
  int size = 0;
  std::vector<Entry> entries;
};

// minimize c^T y  subject to  F y = g  and per-block LMIs.  The variable y
// is free; constants enter through pinned components of y.
struct LmiProgram {
  int num_vars = 0;
  Eigen::VectorXd c;
  Eigen::MatrixXd F;  // may have zero rows
  Eigen::VectorXd g;
  std::vector<LmiBlock> blocks;
  // Leading equality rows whose dual multipliers are reported as lambda.
  int num_functional_rows = 0;
};

enum class SdpStatus { Optimal, Infeasible, Unbounded, MaxIter, NumericalTrouble };
const char* to_string(SdpStatus s);

struct SdpOptions {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iter = 200;
  double step_min = 1e-10;  // NumericalTrouble when steps collapse below this
  bool parallel = true;
  bool verbose = false;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalTrouble;
  Eigen::VectorXd y;
  Eigen::VectorXd eq_duals;                   // one per original equality row
  std::vector<Eigen::MatrixXd> block_duals;   // PSD multiplier per block
  double primal_obj = 0.0;                    // c^T y
  double dual_obj = 0.0;
  double gap = 0.0;                           // |primal - dual|
  double eq_residual = 0.0;                   // ||F y - g||_inf
  double lmi_min_eig = 0.0;                   // min eigenvalue over blocks at y
  double rel_gap = 0.0;
  int iterations = 0;
  std::string message;
};

struct PresolveResult {
  LmiProgram prog;
  bool infeasible = false;
  int removed_rows = 0;
  std::vector<int> row_map;  // presolved row -> original row
  std::string note;
};

// Normalizes equality rows, removes zero and duplicate rows, and flags
// directly contradictory duplicates.  Solution sets are unchanged.
PresolveResult presolve(const LmiProgram& prog);

SdpSolution solve(const LmiProgram& prog, const SdpOptions& opts = {});

// Line-oriented sparse text dump of the conic program (see README for the
// format), for cross-checking against external solvers.
void dump_program(const LmiProgram& prog, std::ostream& os);

}  // namespace momrec
