#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "momrec/tensorrec.hpp"

namespace momrec {

// Problem file: {"schema":1, "kind":"mrp"|"trp-positive"|"trp-general",
// "n":…, "d":… (trp), "K":{…}, "functionals"/"equations"/"tensors":…,
// "options":{…}}.  Unknown fields are rejected; see README for the full
// schema.
struct ProblemFile {
  std::string kind;
  int n = 0, d = 0;  // d is the tensor order; 0 for mrp
  SemialgebraicSet K;
  std::vector<std::pair<Poly, double>> functionals;
  HierarchyOptions options;
};

// Solve output.  Residuals are recomputed from the serialized values when
// the file is written, so a stored result validates itself.
struct ResultFile {
  std::string kind;
  int n = 0, d = 0;
  std::uint64_t seed = 0;
  RecoveryOutcome outcome = RecoveryOutcome::NoFlatTruncation;
  std::optional<Decomposition> dec;  // also carries mrp measures (all signs +)
  double functional_residual = 0.0;
  double membership_residual = 0.0;
  HierarchyReport report;
  double timing_ms = 0.0;
};

ProblemFile problem_from_json(const nlohmann::json& j);
ProblemFile load_problem(const std::string& path);

nlohmann::json problem_to_json(const ProblemFile& p);

nlohmann::json result_to_json(const ResultFile& r, const ProblemFile& problem);
ResultFile result_from_json(const nlohmann::json& j);
ResultFile load_result(const std::string& path);

nlohmann::json poly_to_json(const Poly& p);
Poly poly_from_json(const nlohmann::json& j, int n);

}  // namespace momrec
