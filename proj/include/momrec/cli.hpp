#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "momrec/io.hpp"

namespace momrec::cli {

struct SolveFlags {
  int order_min = 0;
  int order_max = 0;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::string out_path;  // empty: write the result JSON to stdout
};

// Exit codes: 0 recovery, 2 no flat truncation, 3 infeasible,
// 4 solver failure, 1 parse/usage error.
int cmd_solve(const std::string& problem_path, const SolveFlags& flags,
              std::ostream& out, std::ostream& err);

// Recomputes residuals and K-membership from the serialized atoms.
// Exit codes: 0 pass, 2 fail, 1 mismatched pairing or parse error.
int cmd_verify(const std::string& result_path, const std::string& problem_path,
               double tol, std::ostream& out, std::ostream& err);

struct BenchFlags {
  int n = 3, d = 3, m = 4, trials = 20;
  std::string mode = "mrp";  // "mrp" or "trp-general"
  std::uint64_t seed = 1;
  bool b_normal = false;  // TRP mode: right-hand sides N(0,1) instead of planted
  int k_max = 0;
};

// Random-instance harness; prints one line per trial plus a histogram of the
// recovered lengths r.  Exit code 4 if any successful trial violates r <= m,
// else 0.
int cmd_bench(const BenchFlags& flags, std::ostream& out, std::ostream& err);

// Writes the assembled order-k conic program in the sparse text format.
int cmd_dump(const std::string& problem_path, int order, std::ostream& out,
             std::ostream& err);

// MOMREC_FEAS_TOL, MOMREC_GAP_TOL, MOMREC_RANK_TOL environment overrides.
void apply_env_overrides(HierarchyOptions& opt);

}  // namespace momrec::cli
