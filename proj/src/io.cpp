#include "momrec/io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <stdexcept>

namespace momrec {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::invalid_argument(where + ": unknown field '" + it.key() + "'");
}

int require_int(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw std::invalid_argument(where + ": missing integer '" + key + "'");
  return j[key].get<int>();
}

}  // namespace

json poly_to_json(const Poly& p) {
  json terms = json::array();
  for (const auto& [a, c] : p.terms()) terms.push_back({{"exp", a}, {"coeff", c}});
  return json{{"terms", terms}};
}

Poly poly_from_json(const json& j, int n) {
  reject_unknown(j, {"terms"}, "polynomial");
  Poly p(n);
  if (!j.contains("terms") || !j["terms"].is_array())
    throw std::invalid_argument("polynomial: missing 'terms' array");
  for (const auto& t : j["terms"]) {
    reject_unknown(t, {"exp", "coeff"}, "polynomial term");
    Exponent a = t.at("exp").get<Exponent>();
    if (static_cast<int>(a.size()) != n)
      throw std::invalid_argument("polynomial term: exponent length != n");
    p.add_term(a, t.at("coeff").get<double>());
  }
  return p;
}

namespace {

SemialgebraicSet set_from_json(const json& j, int n) {
  reject_unknown(j, {"equalities", "inequalities", "sphere"}, "K");
  SemialgebraicSet K;
  K.n = n;
  if (j.contains("equalities"))
    for (const auto& p : j["equalities"]) K.equalities.push_back(poly_from_json(p, n));
  if (j.contains("inequalities"))
    for (const auto& p : j["inequalities"]) K.inequalities.push_back(poly_from_json(p, n));
  if (j.contains("sphere")) K.sphere = j["sphere"].get<bool>();
  return K;
}

json set_to_json(const SemialgebraicSet& K) {
  json eq = json::array(), in = json::array();
  for (const auto& p : K.equalities) eq.push_back(poly_to_json(p));
  for (const auto& p : K.inequalities) in.push_back(poly_to_json(p));
  return json{{"equalities", eq}, {"inequalities", in}, {"sphere", K.sphere}};
}

HierarchyOptions options_from_json(const json& j) {
  HierarchyOptions opt;
  if (j.is_null()) return opt;
  reject_unknown(j, {"seed", "k_min", "k_max", "tol"}, "options");
  if (j.contains("seed")) opt.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("k_min")) opt.k_min = j["k_min"].get<int>();
  if (j.contains("k_max")) opt.k_max = j["k_max"].get<int>();
  if (j.contains("tol")) {
    double t = j["tol"].get<double>();
    opt.sdp.feas_tol = t;
    opt.sdp.gap_tol = t;
  }
  return opt;
}

}  // namespace

ProblemFile problem_from_json(const json& j) {
  reject_unknown(j,
                 {"schema", "kind", "n", "d", "K", "functionals", "equations", "tensors",
                  "options"},
                 "problem");
  if (require_int(j, "schema", "problem") != 1)
    throw std::invalid_argument("problem: unsupported schema version");
  ProblemFile p;
  if (!j.contains("kind") || !j["kind"].is_string())
    throw std::invalid_argument("problem: missing 'kind'");
  p.kind = j["kind"].get<std::string>();
  if (p.kind != "mrp" && p.kind != "trp-positive" && p.kind != "trp-general")
    throw std::invalid_argument("problem: unknown kind '" + p.kind + "'");
  p.n = require_int(j, "n", "problem");
  if (p.n < 1) throw std::invalid_argument("problem: n must be positive");

  if (j.contains("K")) {
    p.K = set_from_json(j["K"], p.n);
  } else {
    p.K = SemialgebraicSet::unit_sphere(p.n);
  }
  p.options = options_from_json(j.contains("options") ? j["options"] : json());

  if (p.kind == "mrp") {
    if (!j.contains("functionals") || !j["functionals"].is_array())
      throw std::invalid_argument("problem: mrp requires 'functionals'");
    for (const auto& f : j["functionals"]) {
      reject_unknown(f, {"poly", "b"}, "functional");
      p.functionals.emplace_back(poly_from_json(f.at("poly"), p.n), f.at("b").get<double>());
    }
    p.d = 0;
    return p;
  }

  p.d = require_int(j, "d", "problem");
  if (p.d < 1) throw std::invalid_argument("problem: d must be positive");
  if (j.contains("equations")) {
    std::vector<TensorEquation> eqs;
    for (const auto& e : j["equations"]) {
      reject_unknown(e, {"terms", "rhs"}, "equation");
      TensorEquation eq;
      for (const auto& t : e.at("terms")) {
        reject_unknown(t, {"index", "coeff"}, "equation term");
        std::vector<int> subs = t.at("index").get<std::vector<int>>();
        if (static_cast<int>(subs.size()) != p.d)
          throw std::invalid_argument("equation term: index length != d");
        eq.terms.emplace_back(exponent_from_subscripts(p.n, subs),
                              t.at("coeff").get<double>());
      }
      eq.rhs = e.at("rhs").get<double>();
      eqs.push_back(std::move(eq));
    }
    auto fns = equations_to_functionals(p.n, p.d, eqs);
    p.functionals.insert(p.functionals.end(), fns.begin(), fns.end());
  }
  if (j.contains("tensors")) {
    std::vector<std::pair<SymTensor, double>> ms;
    for (const auto& e : j["tensors"]) {
      reject_unknown(e, {"entries", "b"}, "tensor measurement");
      SymTensor F(p.n, p.d);
      for (const auto& t : e.at("entries")) {
        reject_unknown(t, {"index", "value"}, "tensor entry");
        std::vector<int> subs = t.at("index").get<std::vector<int>>();
        if (static_cast<int>(subs.size()) != p.d)
          throw std::invalid_argument("tensor entry: index length != d");
        F.set(exponent_from_subscripts(p.n, subs), t.at("value").get<double>());
      }
      ms.emplace_back(std::move(F), e.at("b").get<double>());
    }
    auto fns = equations_to_functionals(ms);
    p.functionals.insert(p.functionals.end(), fns.begin(), fns.end());
  }
  if (p.functionals.empty() && !j.contains("equations") && !j.contains("tensors"))
    throw std::invalid_argument("problem: tensor recovery requires 'equations' or 'tensors'");
  return p;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open problem file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("problem file is not valid JSON: " + std::string(e.what()));
  }
  return problem_from_json(j);
}

json problem_to_json(const ProblemFile& p) {
  json j{{"schema", 1}, {"kind", p.kind}, {"n", p.n}, {"K", set_to_json(p.K)}};
  if (p.kind == "mrp") {
    json fns = json::array();
    for (const auto& [f, b] : p.functionals)
      fns.push_back({{"poly", poly_to_json(f)}, {"b", b}});
    j["functionals"] = fns;
  } else {
    j["d"] = p.d;
    json eqs = json::array();
    for (const auto& [f, b] : p.functionals) {
      json terms = json::array();
      for (const auto& [a, c] : f.terms()) {
        std::vector<int> subs;
        for (int i = 0; i < p.n; ++i)
          for (int k = 0; k < a[i]; ++k) subs.push_back(i + 1);
        terms.push_back({{"index", subs}, {"coeff", c}});
      }
      eqs.push_back({{"terms", terms}, {"rhs", b}});
    }
    j["equations"] = eqs;
  }
  j["options"] = {{"seed", p.options.seed}, {"k_min", p.options.k_min},
                  {"k_max", p.options.k_max}};
  return j;
}

namespace {

json report_to_json(const HierarchyReport& rep) {
  json orders = json::array();
  for (const auto& r : rep.orders) {
    json o{{"k", r.k},
           {"status", to_string(r.status)},
           {"phi", r.phi},
           {"lambda", std::vector<double>(r.lambda.data(), r.lambda.data() + r.lambda.size())},
           {"zero_branch", r.zero_branch}};
    if (r.flat_t) {
      o["flat_t"] = *r.flat_t;
      o["rank_t"] = r.rank_t;
      o["rank_low"] = r.rank_low;
    }
    if (!r.note.empty()) o["note"] = r.note;
    orders.push_back(std::move(o));
  }
  return orders;
}

}  // namespace

json result_to_json(const ResultFile& r, const ProblemFile& problem) {
  json j{{"schema", 1},
         {"kind", r.kind},
         {"n", r.n},
         {"seed", r.seed},
         {"status", to_string(r.outcome)},
         {"timing_ms", r.timing_ms}};
  if (r.d > 0) j["d"] = r.d;
  double fres = 0.0, mres = 0.0;
  if (r.dec) {
    json terms = json::array();
    for (const auto& t : r.dec->terms) {
      terms.push_back({{"sign", t.sign},
                       {"weight", t.weight},
                       {"atom", std::vector<double>(t.atom.data(), t.atom.data() + t.atom.size())}});
      mres = std::max(mres, problem.K.membership_residual(t.atom));
    }
    j["decomposition"] = {{"terms", terms}};
    fres = residual(*r.dec, problem.functionals);
  }
  j["residuals"] = {{"functional", fres}, {"membership", mres}};
  j["hierarchy"] = report_to_json(r.report);
  return j;
}

ResultFile result_from_json(const json& j) {
  reject_unknown(j,
                 {"schema", "kind", "n", "d", "seed", "status", "timing_ms",
                  "decomposition", "residuals", "hierarchy"},
                 "result");
  if (require_int(j, "schema", "result") != 1)
    throw std::invalid_argument("result: unsupported schema version");
  ResultFile r;
  r.kind = j.at("kind").get<std::string>();
  r.n = require_int(j, "n", "result");
  r.d = j.contains("d") ? j["d"].get<int>() : 0;
  if (j.contains("seed")) r.seed = j["seed"].get<std::uint64_t>();
  std::string st = j.at("status").get<std::string>();
  if (st == "recovered") r.outcome = RecoveryOutcome::Recovered;
  else if (st == "no-flat-truncation") r.outcome = RecoveryOutcome::NoFlatTruncation;
  else if (st == "infeasible") r.outcome = RecoveryOutcome::Infeasible;
  else if (st == "solver-failure") r.outcome = RecoveryOutcome::SolverFailure;
  else throw std::invalid_argument("result: unknown status '" + st + "'");
  if (j.contains("timing_ms")) r.timing_ms = j["timing_ms"].get<double>();
  if (j.contains("decomposition")) {
    reject_unknown(j["decomposition"], {"terms"}, "decomposition");
    Decomposition dec;
    dec.n = r.n;
    dec.d = std::max(r.d, 1);
    for (const auto& t : j["decomposition"].at("terms")) {
      reject_unknown(t, {"sign", "weight", "atom"}, "decomposition term");
      DecompTerm term;
      term.sign = t.at("sign").get<int>();
      if (term.sign != 1 && term.sign != -1)
        throw std::invalid_argument("decomposition term: sign must be +-1");
      term.weight = t.at("weight").get<double>();
      std::vector<double> a = t.at("atom").get<std::vector<double>>();
      if (static_cast<int>(a.size()) != r.n)
        throw std::invalid_argument("decomposition term: atom length != n");
      term.atom = Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
      dec.terms.push_back(std::move(term));
    }
    r.dec = std::move(dec);
  }
  return r;
}

ResultFile load_result(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open result file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("result file is not valid JSON: " + std::string(e.what()));
  }
  return result_from_json(j);
}

}  // namespace momrec
